#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gcs/network.hpp"

namespace gcs {

// 17 significant digits, enough to round-trip a double exactly.
std::string format_double(double v);

// GCSNET v1: line 1 "GCSNET 1"; line 2 `d k_0 ... k_d`; then for each layer
// k_i rows of k_{i-1} decimal floats, row-major.
void save_network(const GenerativeNetwork& net, const std::string& path);
GenerativeNetwork load_network(const std::string& path);

// GCSMAT: header "GCSMAT 1 R C" followed by R rows of C floats.
void save_matrix(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd load_matrix(const std::string& path);

// Flat vector file: one value per line, '#' comments and blank lines ignored.
void save_vector(const Eigen::VectorXd& v, const std::string& path);
Eigen::VectorXd load_vector(const std::string& path);

// Two-column CSV "index,<name>" with 1-based indices.
void save_indexed_csv(const Eigen::VectorXd& v, const std::string& value_name,
                      const std::string& path);
Eigen::VectorXd load_indexed_csv(const std::string& path);

// Sampling plan CSV "i,index" with 1-based draw number and row index.
void save_plan_csv(const std::vector<Eigen::Index>& indices, const std::string& path);
std::vector<Eigen::Index> load_plan_csv(const std::string& path);

// Measurements CSV "i,index,re,im".
void save_measurements_csv(const std::vector<Eigen::Index>& indices,
                           const Eigen::VectorXcd& b, const std::string& path);
void load_measurements_csv(const std::string& path,
                           std::vector<Eigen::Index>& indices, Eigen::VectorXcd& b);

}  // namespace gcs
