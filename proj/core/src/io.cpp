#include "gcs/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gcs/common.hpp"

namespace gcs {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_network(const GenerativeNetwork& net, const std::string& path) {
  auto out = open_out(path);
  out << "GCSNET 1\n";
  out << net.depth();
  for (Eigen::Index w : net.widths()) out << ' ' << w;
  out << '\n';
  for (Eigen::Index layer = 0; layer < net.depth(); ++layer) {
    const Eigen::MatrixXd& w = net.weight(layer);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(w(r, c));
      }
      out << '\n';
    }
  }
  finish(out, path);
}

GenerativeNetwork load_network(const std::string& path) {
  auto in = open_in(path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "GCSNET" || version != 1)
    malformed(path, "expected header 'GCSNET 1'");
  Eigen::Index d = 0;
  if (!(in >> d) || d < 1) malformed(path, "invalid depth");
  std::vector<Eigen::Index> widths(static_cast<std::size_t>(d) + 1);
  for (auto& w : widths)
    if (!(in >> w) || w < 1) malformed(path, "invalid width list");
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(widths.size() - 1);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Eigen::MatrixXd w(widths[i + 1], widths[i]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        if (!(in >> w(r, c)))
          malformed(path, "missing weight values for layer " + std::to_string(i + 1));
    weights.push_back(std::move(w));
  }
  return GenerativeNetwork(std::move(widths), std::move(weights));
}

void save_matrix(const Eigen::MatrixXd& m, const std::string& path) {
  auto out = open_out(path);
  out << "GCSMAT 1 " << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  finish(out, path);
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  auto in = open_in(path);
  std::string magic;
  int version = 0;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> magic >> version >> rows >> cols) || magic != "GCSMAT" || version != 1 ||
      rows < 1 || cols < 1)
    malformed(path, "expected header 'GCSMAT 1 R C'");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> m(r, c))) malformed(path, "missing matrix values");
  return m;
}

void save_vector(const Eigen::VectorXd& v, const std::string& path) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
  finish(out, path);
}

Eigen::VectorXd load_vector(const std::string& path) {
  auto in = open_in(path);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double v = 0.0;
    if (ss >> v) {
      values.push_back(v);
      std::string rest;
      if (ss >> rest)
        malformed(path, "line " + std::to_string(lineno) + ": expected one value");
    } else {
      std::string rest;
      if (ss.clear(), ss >> rest)
        malformed(path, "line " + std::to_string(lineno) + ": not a number");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void save_indexed_csv(const Eigen::VectorXd& v, const std::string& value_name,
                      const std::string& path) {
  auto out = open_out(path);
  out << "index," << value_name << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << (i + 1) << ',' << format_double(v[i]) << '\n';
  finish(out, path);
}

Eigen::VectorXd load_indexed_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) malformed(path, "empty CSV");
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    long long index = 0;
    double value = 0.0;
    if (std::sscanf(line.c_str(), "%lld,%lf", &index, &value) != 2)
      malformed(path, "line " + std::to_string(lineno) + ": expected 'index,value'");
    if (index != static_cast<long long>(values.size()) + 1)
      malformed(path, "line " + std::to_string(lineno) + ": indices must be 1,2,...");
    values.push_back(value);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void save_plan_csv(const std::vector<Eigen::Index>& indices, const std::string& path) {
  auto out = open_out(path);
  out << "i,index\n";
  for (std::size_t i = 0; i < indices.size(); ++i)
    out << (i + 1) << ',' << (indices[i] + 1) << '\n';
  finish(out, path);
}

std::vector<Eigen::Index> load_plan_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) malformed(path, "empty CSV");
  std::vector<Eigen::Index> indices;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    long long i = 0, index = 0;
    if (std::sscanf(line.c_str(), "%lld,%lld", &i, &index) != 2 || index < 1)
      malformed(path, "line " + std::to_string(lineno) + ": expected 'i,index'");
    indices.push_back(static_cast<Eigen::Index>(index - 1));
  }
  return indices;
}

void save_measurements_csv(const std::vector<Eigen::Index>& indices,
                           const Eigen::VectorXcd& b, const std::string& path) {
  require(static_cast<Eigen::Index>(indices.size()) == b.size(),
          "measurement/index length mismatch");
  auto out = open_out(path);
  out << "i,index,re,im\n";
  for (Eigen::Index i = 0; i < b.size(); ++i)
    out << (i + 1) << ',' << (indices[static_cast<std::size_t>(i)] + 1) << ','
        << format_double(b[i].real()) << ',' << format_double(b[i].imag()) << '\n';
  finish(out, path);
}

void load_measurements_csv(const std::string& path,
                           std::vector<Eigen::Index>& indices, Eigen::VectorXcd& b) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) malformed(path, "empty CSV");
  indices.clear();
  std::vector<std::complex<double>> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    long long i = 0, index = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lf,%lf", &i, &index, &re, &im) != 4 ||
        index < 1)
      malformed(path, "line " + std::to_string(lineno) + ": expected 'i,index,re,im'");
    indices.push_back(static_cast<Eigen::Index>(index - 1));
    values.emplace_back(re, im);
  }
  b = Eigen::Map<Eigen::VectorXcd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace gcs
