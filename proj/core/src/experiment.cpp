#include "gcs/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gcs/coherence.hpp"
#include "gcs/common.hpp"
#include "gcs/io.hpp"
#include "gcs/parallel.hpp"
#include "gcs/svg.hpp"
#include "gcs/transform_spec.hpp"

namespace gcs {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

[[noreturn]] void config_error(const std::string& source, std::size_t line,
                               const std::string& what) {
  throw std::invalid_argument(source + ":" + std::to_string(line) + ": " + what);
}

std::int64_t to_int(const std::string& source, std::size_t line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::int64_t out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    config_error(source, line, "expected an integer, got '" + v + "'");
  }
}

double to_double(const std::string& source, std::size_t line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    config_error(source, line, "expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& source, std::size_t line, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  config_error(source, line, "expected true or false, got '" + v + "'");
}

// Comma list of integers; one "..." continues the geometric progression of
// the two preceding entries up to the entry that follows it.
std::vector<Eigen::Index> to_index_list(const std::string& source, std::size_t line,
                                        const std::string& value) {
  const auto items = split_list(value);
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] == "..." || items[i] == "\xe2\x80\xa6") {
      if (out.size() < 2 || i + 1 != items.size() - 1)
        config_error(source, line,
                     "'...' needs two entries before it and one after it");
      const Eigen::Index a = out[out.size() - 2];
      const Eigen::Index b = out.back();
      if (a <= 0 || b % a != 0 || b / a < 2)
        config_error(source, line, "'...' needs an integer ratio of at least 2");
      const Eigen::Index ratio = b / a;
      const auto target = static_cast<Eigen::Index>(
          to_int(source, line, items[i + 1]));
      Eigen::Index v = b;
      while (v < target) {
        v *= ratio;
        out.push_back(v);
      }
      if (v != target)
        config_error(source, line, "'...' does not reach " + items[i + 1] +
                                       " with ratio " + std::to_string(ratio));
      return out;
    }
    out.push_back(static_cast<Eigen::Index>(to_int(source, line, items[i])));
  }
  return out;
}

struct SchemeContext {
  std::string name;
  ProbabilityVector p;
};

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig config;
  config.m_grid.clear();
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  bool have_net = false;
  bool have_grid = false;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      config_error(source, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(source, lineno, "missing key");
    if (value.empty()) config_error(source, lineno, "missing value for '" + key + "'");
    if (!seen.insert(key).second)
      config_error(source, lineno, "duplicate key '" + key + "'");

    if (key == "net.file") {
      config.net_file = value;
      have_net = true;
    } else if (key == "net.widths") {
      config.net_widths = to_index_list(source, lineno, value);
      have_net = true;
    } else if (key == "net.seed") {
      config.net_seed = static_cast<std::uint64_t>(to_int(source, lineno, value));
    } else if (key == "transform") {
      config.transform = value;
    } else if (key == "schemes") {
      config.schemes = split_list(value);
      if (config.schemes.empty()) config_error(source, lineno, "empty scheme list");
    } else if (key == "m.grid") {
      config.m_grid = to_index_list(source, lineno, value);
      have_grid = true;
    } else if (key == "trials") {
      config.trials = to_int(source, lineno, value);
    } else if (key == "noise.level") {
      config.noise_level = to_double(source, lineno, value);
    } else if (key == "signal.in_range") {
      config.in_range = to_bool(source, lineno, value);
    } else if (key == "signal.file") {
      config.signal_file = value;
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(to_int(source, lineno, value));
    } else if (key == "coherence.method") {
      if (value != "heuristic" && value != "exact-pieces" && value != "file")
        config_error(source, lineno, "coherence.method must be heuristic, exact-pieces or file");
      config.coherence_method = value;
    } else if (key == "coherence.file") {
      config.coherence_file = value;
    } else if (key == "coherence.batch") {
      config.coherence_batch = to_int(source, lineno, value);
    } else if (key == "sampling.blocks") {
      config.sampling_blocks = static_cast<Eigen::Index>(to_int(source, lineno, value));
    } else if (key == "recover.restarts") {
      config.recovery.restarts = static_cast<int>(to_int(source, lineno, value));
    } else if (key == "recover.iterations") {
      config.recovery.iterations = to_int(source, lineno, value);
    } else if (key == "recover.lr") {
      config.recovery.lr = to_double(source, lineno, value);
    } else if (key == "recover.beta1") {
      config.recovery.beta1 = to_double(source, lineno, value);
    } else if (key == "recover.beta2") {
      config.recovery.beta2 = to_double(source, lineno, value);
    } else if (key == "recover.weight_decay") {
      config.recovery.weight_decay = to_double(source, lineno, value);
    } else if (key == "recover.preconditioned") {
      config.recovery.preconditioned = to_bool(source, lineno, value);
    } else if (key == "recover.stop_tol") {
      config.recovery.stop_tol = to_double(source, lineno, value);
    } else if (key == "out.dir") {
      config.out_dir = value;
    } else {
      config_error(source, lineno, "unknown key '" + key + "'");
    }
  }

  if (!have_net)
    throw std::invalid_argument(source + ": config needs net.file or net.widths");
  if (!have_grid) throw std::invalid_argument(source + ": config needs m.grid");
  require(!config.m_grid.empty(), "m.grid must be nonempty");
  for (Eigen::Index m : config.m_grid) require(m >= 1, "m.grid entries must be >= 1");
  require(std::is_sorted(config.m_grid.begin(), config.m_grid.end()) &&
              std::adjacent_find(config.m_grid.begin(), config.m_grid.end()) ==
                  config.m_grid.end(),
          "m.grid must be strictly ascending");
  require(config.trials >= 1, "trials must be >= 1");
  require(config.noise_level >= 0.0, "noise.level must be >= 0");
  require(config.sampling_blocks >= 1, "sampling.blocks must be >= 1");
  if (!config.in_range)
    require(!config.signal_file.empty(), "out-of-range runs need signal.file");
  if (config.coherence_method == "file")
    require(!config.coherence_file.empty(), "coherence.method=file needs coherence.file");
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return parse_config(in, path);
}

ExperimentResults run_phase_transition(const ExperimentConfig& config) {
  const GenerativeNetwork net =
      config.net_file.empty() ? random_gaussian_init(config.net_widths, config.net_seed)
                              : load_network(config.net_file);
  const UnitaryOperator op = parse_transform_spec(config.transform, net.output_dim());
  require(op.size() == net.output_dim(),
          "transform size does not match the network output");

  const RngStream root(config.seed);
  ExperimentResults results;

  // Coherences are computed once and shared by every adapted cell.
  const bool needs_alpha =
      std::any_of(config.schemes.begin(), config.schemes.end(),
                  [](const std::string& s) { return s == "adapted"; });
  CoherenceVector alpha;
  if (needs_alpha) {
    if (config.coherence_method == "file") {
      alpha = load_coherence_csv(config.coherence_file);
    } else if (config.coherence_method == "exact-pieces") {
      alpha = coherence_exact_pieces(op, enumerate_pieces(net));
    } else {
      alpha = coherence_heuristic(net, op, config.coherence_batch,
                                  root.split(0xa1fa).next_u64());
    }
    results.alpha = alpha.alpha;
  }

  std::vector<SchemeContext> schemes;
  for (const auto& name : config.schemes) {
    SchemeContext ctx;
    ctx.name = name;
    if (name == "uniform") {
      ctx.p = uniform_probabilities(net.output_dim());
    } else if (name == "adapted") {
      ctx.p = optimal_probabilities(alpha);
    } else if (name.rfind("custom:", 0) == 0) {
      ctx.p = load_probabilities_csv(name.substr(7));
      require(ctx.p.p.size() == net.output_dim(),
              "custom probability vector length does not match n");
    } else {
      throw std::invalid_argument("unknown scheme '" + name +
                                  "' (expected uniform, adapted or custom:FILE)");
    }
    schemes.push_back(std::move(ctx));
  }

  // Signals are shared across schemes and measurement counts so that cells
  // are paired; one signal per trial.
  std::vector<Eigen::VectorXd> signals(static_cast<std::size_t>(config.trials));
  if (config.in_range) {
    for (std::int64_t t = 0; t < config.trials; ++t) {
      RngStream sig = root.split(1).split(static_cast<std::uint64_t>(t));
      Eigen::VectorXd z(net.latent_dim());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sig.gaussian();
      signals[static_cast<std::size_t>(t)] = net.forward(z);
    }
  } else {
    const Eigen::VectorXd x0 = load_vector(config.signal_file);
    require(x0.size() == net.output_dim(), "signal file length does not match n");
    for (auto& s : signals) s = x0;
  }

  const std::size_t scheme_count = schemes.size();
  const std::size_t m_count = config.m_grid.size();
  const auto trial_count = static_cast<std::size_t>(config.trials);
  const std::size_t cells = scheme_count * m_count * trial_count;
  results.rows.resize(cells);

  parallel_for(cells, [&](std::size_t flat) {
    const std::size_t s = flat / (m_count * trial_count);
    const std::size_t mi = (flat / trial_count) % m_count;
    const std::size_t t = flat % trial_count;
    const Eigen::Index m = config.m_grid[mi];
    const SchemeContext& scheme = schemes[s];
    const Eigen::VectorXd& x0 = signals[t];

    // Noise is drawn per (m, trial) and shared across schemes (paired cells);
    // plans and optimizer initializations are per cell.
    const RngStream cell = root.split(2).split(s).split(mi).split(t);
    const RngStream noise_stream = root.split(3).split(mi).split(t);
    const Eigen::VectorXcd eta =
        complex_gaussian_noise(m, config.noise_level, noise_stream);

    const SamplingPlan plan =
        config.sampling_blocks > 1
            ? draw_plan_blocks(scheme.p, m, config.sampling_blocks, cell.split(0).next_u64())
            : draw_plan(scheme.p, m, cell.split(0).next_u64());
    const MeasurementSet meas = measure(x0, plan, op, eta);

    Preconditioner precond;
    const Preconditioner* precond_ptr = nullptr;
    if (config.recovery.preconditioned) {
      precond = build_preconditioner(plan);
      precond_ptr = &precond;
    }
    RecoveryConfig rc = config.recovery;
    rc.seed = cell.split(1).next_u64();
    const RecoveryResult rec = recover(net, meas, op, precond_ptr, rc);

    ExperimentRow row;
    row.scheme = scheme.name;
    row.m = m;
    row.trial = static_cast<std::int64_t>(t) + 1;
    row.rre = rre(x0, rec.x_hat);
    row.objective = rec.objective;
    row.eps_hat = rec.eps_hat;
    row.success = row.rre < kSuccessRreThreshold;
    results.rows[flat] = std::move(row);
  });

  // Per (scheme, m) summary in row order.
  for (std::size_t s = 0; s < scheme_count; ++s) {
    for (std::size_t mi = 0; mi < m_count; ++mi) {
      ExperimentSummaryRow sr;
      sr.scheme = schemes[s].name;
      sr.m = config.m_grid[mi];
      sr.trials = config.trials;
      std::vector<double> rres;
      double sum = 0.0;
      std::int64_t successes = 0;
      for (std::size_t t = 0; t < trial_count; ++t) {
        const auto& row = results.rows[(s * m_count + mi) * trial_count + t];
        rres.push_back(row.rre);
        sum += row.rre;
        successes += row.success ? 1 : 0;
      }
      sr.success_rate = static_cast<double>(successes) / static_cast<double>(config.trials);
      sr.median_rre = median_of(rres);
      sr.mean_rre = sum / static_cast<double>(config.trials);
      results.summary.push_back(std::move(sr));
    }
  }

  std::filesystem::create_directories(config.out_dir);
  write_results_csv(results, config.out_dir + "/results.csv");
  write_summary_csv(results, config.out_dir + "/summary.csv");
  return results;
}

void write_results_csv(const ExperimentResults& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "trial,scheme,m,rre,objective,eps_hat,success\n";
  for (const auto& row : results.rows) {
    out << row.trial << ',' << row.scheme << ',' << row.m << ','
        << format_double(row.rre) << ',' << format_double(row.objective) << ','
        << format_double(row.eps_hat) << ',' << (row.success ? 1 : 0) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_summary_csv(const ExperimentResults& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "scheme,m,trials,success_rate,median_rre,mean_rre\n";
  for (const auto& row : results.summary) {
    out << row.scheme << ',' << row.m << ',' << row.trials << ','
        << format_double(row.success_rate) << ',' << format_double(row.median_rre)
        << ',' << format_double(row.mean_rre) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

ExperimentResults load_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "trial,scheme,m,rre,objective,eps_hat,success")
    throw std::invalid_argument(path + ": not a results CSV");
  ExperimentResults results;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ExperimentRow row;
    try {
      std::getline(ss, field, ',');
      row.trial = std::stoll(field);
      std::getline(ss, row.scheme, ',');
      std::getline(ss, field, ',');
      row.m = std::stoll(field);
      std::getline(ss, field, ',');
      row.rre = std::stod(field);
      std::getline(ss, field, ',');
      row.objective = std::stod(field);
      std::getline(ss, field, ',');
      row.eps_hat = std::stod(field);
      if (!std::getline(ss, field)) throw std::invalid_argument("short row");
      row.success = std::stoi(field) != 0;
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad row");
    }
    results.rows.push_back(std::move(row));
  }

  // Rebuild the summary from the rows.
  std::vector<std::pair<std::string, Eigen::Index>> order;
  std::map<std::pair<std::string, Eigen::Index>, std::vector<const ExperimentRow*>> groups;
  for (const auto& row : results.rows) {
    const auto key = std::make_pair(row.scheme, row.m);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&row);
  }
  for (const auto& key : order) {
    const auto& rows = groups[key];
    ExperimentSummaryRow sr;
    sr.scheme = key.first;
    sr.m = key.second;
    sr.trials = static_cast<std::int64_t>(rows.size());
    std::vector<double> rres;
    double sum = 0.0;
    std::int64_t successes = 0;
    for (const auto* r : rows) {
      rres.push_back(r->rre);
      sum += r->rre;
      successes += r->success ? 1 : 0;
    }
    sr.success_rate = static_cast<double>(successes) / static_cast<double>(rows.size());
    sr.median_rre = median_of(rres);
    sr.mean_rre = sum / static_cast<double>(rows.size());
    results.summary.push_back(std::move(sr));
  }
  return results;
}

std::vector<std::string> emit_plots(const ExperimentResults& results,
                                    const std::string& out_dir) {
  require(!results.rows.empty(), "no results to plot");
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> scheme_order;
  for (const auto& sr : results.summary)
    if (std::find(scheme_order.begin(), scheme_order.end(), sr.scheme) ==
        scheme_order.end())
      scheme_order.push_back(sr.scheme);

  std::vector<PlotSeries> success, med;
  for (const auto& name : scheme_order) {
    PlotSeries s1{name, {}}, s2{name, {}};
    for (const auto& sr : results.summary) {
      if (sr.scheme != name) continue;
      s1.points.emplace_back(static_cast<double>(sr.m), sr.success_rate);
      s2.points.emplace_back(static_cast<double>(sr.m), sr.median_rre);
    }
    success.push_back(std::move(s1));
    med.push_back(std::move(s2));
  }

  std::vector<std::string> written;
  PlotOptions opt;
  opt.title = "Recovery success rate";
  opt.x_label = "measurements m";
  opt.y_label = "success proportion";
  opt.log_x = true;
  write_line_plot(success, opt, out_dir + "/success_vs_m.svg");
  written.push_back(out_dir + "/success_vs_m.svg");

  opt.title = "Median relative recovery error";
  opt.y_label = "median rre";
  opt.log_y = true;
  write_line_plot(med, opt, out_dir + "/rre_vs_m.svg");
  written.push_back(out_dir + "/rre_vs_m.svg");

  if (results.alpha.size() > 0) {
    PlotSeries spectrum{"alpha", {}};
    for (Eigen::Index j = 0; j < results.alpha.size(); ++j)
      spectrum.points.emplace_back(static_cast<double>(j + 1), results.alpha[j]);
    PlotOptions copt;
    copt.title = "Local coherence spectrum";
    copt.x_label = "row index";
    copt.y_label = "alpha";
    copt.log_y = true;
    write_line_plot({spectrum}, copt, out_dir + "/coherence_spectrum.svg");
    written.push_back(out_dir + "/coherence_spectrum.svg");
  }
  return written;
}

}  // namespace gcs
