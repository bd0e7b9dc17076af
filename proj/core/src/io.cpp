#include "ptcure/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ptcure::io {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& raw) {
  const auto begin = raw.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = raw.find_last_not_of(" \t\r\n");
  return raw.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trimmed(line.substr(start)));
      break;
    }
    fields.push_back(trimmed(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_number(const std::string& token, const std::string& where) {
  if (token.empty()) {
    throw std::invalid_argument(where + ": empty numeric field");
  }
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) {
    throw std::invalid_argument(where + ": cannot parse number '" + token + "'");
  }
  return value;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

// CSV field quoting for free-form text (error messages may hold commas).
std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string hex64(std::uint64_t value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "0x%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::uint64_t parse_hex64(const std::string& text) {
  return std::strtoull(text.c_str(), nullptr, 16);
}

}  // namespace

std::string format_value(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

SurvivalDataset read_dataset_csv(const std::string& path, bool short_followup) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  const std::vector<std::string> header = split_fields(line);
  if (header.size() < 2 || header[0] != "time" || header[1] != "event") {
    throw std::invalid_argument(path +
                                ": header must start with 'time,event'");
  }

  std::vector<std::size_t> x_cols, z_cols;
  SurvivalDataset data;
  for (std::size_t c = 2; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name.rfind("x_", 0) == 0) {
      x_cols.push_back(c);
      data.x_names.push_back(name.substr(2));
    } else if (name.rfind("z_", 0) == 0) {
      z_cols.push_back(c);
      data.z_names.push_back(name.substr(2));
    } else {
      throw std::invalid_argument(
          path + ": column '" + name + "' must be prefixed x_ or z_");
    }
  }

  if (short_followup) {
    std::set<std::string> x_set(data.x_names.begin(), data.x_names.end());
    std::vector<std::string> shared;
    for (const auto& name : data.z_names) {
      if (x_set.count(name)) shared.push_back(name);
    }
    if (!shared.empty()) {
      std::string joined;
      for (const auto& name : shared) {
        if (!joined.empty()) joined += ", ";
        joined += name;
      }
      throw std::invalid_argument(
          path + ": covariates shared between the x and z blocks are not "
                 "identifiable under short follow-up: " + joined);
    }
  }

  std::vector<double> times, events;
  std::vector<std::vector<double>> x_rows, z_rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << path << " line " << line_number << ": expected " << header.size()
          << " fields, got " << fields.size();
      throw std::invalid_argument(msg.str());
    }
    std::ostringstream where;
    where << path << " line " << line_number;
    times.push_back(parse_number(fields[0], where.str() + " (time)"));
    const double event = parse_number(fields[1], where.str() + " (event)");
    if (event != 0.0 && event != 1.0) {
      std::ostringstream msg;
      msg << path << " line " << line_number << ": event must be 0 or 1, got "
          << fields[1];
      throw std::invalid_argument(msg.str());
    }
    events.push_back(event);
    std::vector<double> xr, zr;
    for (const std::size_t c : x_cols) {
      xr.push_back(parse_number(fields[c], where.str() + " (" + header[c] + ")"));
    }
    for (const std::size_t c : z_cols) {
      zr.push_back(parse_number(fields[c], where.str() + " (" + header[c] + ")"));
    }
    x_rows.push_back(std::move(xr));
    z_rows.push_back(std::move(zr));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(times.size());
  if (n == 0) throw std::invalid_argument(path + ": no data rows");
  data.times = Eigen::Map<Eigen::VectorXd>(times.data(), n);
  data.events = Eigen::Map<Eigen::VectorXd>(events.data(), n);
  data.x.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  data.z.resize(n, static_cast<Eigen::Index>(z_cols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < x_cols.size(); ++j) data.x(i, j) = x_rows[i][j];
    for (std::size_t j = 0; j < z_cols.size(); ++j) data.z(i, j) = z_rows[i][j];
  }
  validate_dataset(data);
  return data;
}

void write_dataset_csv(const std::string& path, const SurvivalDataset& data) {
  std::ofstream out = open_for_write(path);
  out << "time,event";
  for (const auto& name : data.x_names) out << ",x_" << name;
  for (const auto& name : data.z_names) out << ",z_" << name;
  out << "\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_value(data.times[i]) << ','
        << static_cast<int>(data.events[i]);
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      out << ',' << format_value(data.x(i, j));
    }
    for (Eigen::Index j = 0; j < data.q(); ++j) {
      out << ',' << format_value(data.z(i, j));
    }
    out << "\n";
  }
}

void write_simulation_sidecar(const std::string& path,
                              const GeneratedDataset& generated) {
  std::ofstream out = open_for_write(path);
  out << "subject,cured,raw_time\n";
  for (Eigen::Index i = 0; i < generated.data.n(); ++i) {
    out << i + 1 << ',' << static_cast<int>(generated.cured[i]) << ','
        << format_value(generated.raw_times[i]) << "\n";
  }
}

void write_draws_csv(const std::string& path, const ChainOutput& chain) {
  std::ofstream out = open_for_write(path);
  for (std::size_t j = 0; j < chain.names.size(); ++j) {
    if (j > 0) out << ',';
    out << chain.names[j];
  }
  out << "\n";
  for (Eigen::Index r = 0; r < chain.kept(); ++r) {
    for (Eigen::Index c = 0; c < chain.columns(); ++c) {
      if (c > 0) out << ',';
      out << format_value(chain.draws(r, c));
    }
    out << "\n";
  }
}

ChainOutput read_draws_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  ChainOutput chain;
  chain.names = split_fields(line);

  const std::size_t cols = chain.names.size();
  std::size_t pos = 0;
  while (pos < cols && chain.names[pos].rfind("phi_", 0) == 0) ++pos;
  chain.num_basis = static_cast<int>(pos);
  if (chain.num_basis == 0 || pos >= cols || chain.names[pos] != "beta0") {
    throw std::invalid_argument(path + ": header is not a draws layout");
  }
  ++pos;
  while (pos < cols && chain.names[pos].rfind("beta_", 0) == 0) {
    ++chain.p;
    ++pos;
  }
  while (pos < cols && chain.names[pos].rfind("gamma_", 0) == 0) {
    ++chain.q;
    ++pos;
  }
  if (pos + 2 != cols || chain.names[pos] != "tau" ||
      chain.names[pos + 1] != "delta") {
    throw std::invalid_argument(path + ": header is not a draws layout");
  }

  std::vector<double> values;
  int rows = 0;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != cols) {
      std::ostringstream msg;
      msg << path << " line " << line_number << ": expected " << cols
          << " fields, got " << fields.size();
      throw std::invalid_argument(msg.str());
    }
    std::ostringstream where;
    where << path << " line " << line_number;
    for (const auto& field : fields) {
      values.push_back(parse_number(field, where.str()));
    }
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument(path + ": no draws");

  chain.draws = Eigen::Map<
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, static_cast<Eigen::Index>(cols));
  chain.fixed_phi = chain.draws(0, chain.num_basis - 1);
  chain.iterations = rows;
  chain.burnin = 0;
  return chain;
}

void write_summary_csv(const std::string& path, const SummaryResult& summary) {
  std::ofstream out = open_for_write(path);
  out << "parameter,mean,median,sd,hpd_lower,hpd_upper\n";
  for (const auto& row : summary.parameters) {
    out << row.name << ',' << format_value(row.mean) << ','
        << format_value(row.median) << ',' << format_value(row.sd) << ','
        << format_value(row.lower) << ',' << format_value(row.upper) << "\n";
  }
}

void write_summary_json(const std::string& path, const SummaryResult& summary) {
  json doc;
  doc["level"] = summary.level;
  doc["parameters"] = json::array();
  for (const auto& row : summary.parameters) {
    doc["parameters"].push_back({{"name", row.name},
                                 {"mean", row.mean},
                                 {"median", row.median},
                                 {"sd", row.sd},
                                 {"hpd_lower", row.lower},
                                 {"hpd_upper", row.upper}});
  }
  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << "\n";
}

void write_geweke_csv(const std::string& path,
                      const std::vector<GewekeRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "parameter,z\n";
  for (const auto& row : rows) {
    out << row.name << ',' << format_value(row.z) << "\n";
  }
}

void write_curve_csv(const std::string& path, const CurveBand& band) {
  std::ofstream out = open_for_write(path);
  out << "t,median,lower,upper\n";
  for (Eigen::Index g = 0; g < band.grid.size(); ++g) {
    out << format_value(band.grid[g]) << ',' << format_value(band.median[g])
        << ',' << format_value(band.lower[g]) << ','
        << format_value(band.upper[g]) << "\n";
  }
}

void write_curve_matrix_csv(const std::string& path,
                            const Eigen::VectorXd& grid,
                            const Eigen::MatrixXd& curves) {
  if (grid.size() != curves.rows()) {
    throw std::invalid_argument("curve grid and matrix disagree on length");
  }
  std::ofstream out = open_for_write(path);
  out << "t";
  for (Eigen::Index c = 0; c < curves.cols(); ++c) out << ",rep_" << c + 1;
  out << "\n";
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    out << format_value(grid[g]);
    for (Eigen::Index c = 0; c < curves.cols(); ++c) {
      out << ',' << format_value(curves(g, c));
    }
    out << "\n";
  }
}

void write_study_table_csv(const std::string& path, const StudyResult& study,
                           double cure_fraction, int setting) {
  std::ofstream out = open_for_write(path);
  char cure_label[32];
  std::snprintf(cure_label, sizeof(cure_label), "%g%%", 100.0 * cure_fraction);
  out << "Cure,Setting,Parameters,Bias,CV90,CV95,ESE,RMSE\n";
  for (const auto& row : study.table) {
    out << cure_label << ',' << setting << ',' << row.name << ','
        << format_value(row.bias) << ',' << format_value(row.coverage90) << ','
        << format_value(row.coverage95) << ',' << format_value(row.ese) << ','
        << format_value(row.rmse) << "\n";
  }
}

void write_replicate_estimates_csv(const std::string& path,
                                   const StudyResult& study) {
  std::ofstream out = open_for_write(path);
  out << "replicate,ok";
  for (const auto& name : study.parameter_names) {
    out << ",median_" << name << ",lo90_" << name << ",hi90_" << name
        << ",lo95_" << name << ",hi95_" << name;
  }
  out << ",error\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& fit : study.fits) {
    out << fit.index + 1 << ',' << (fit.ok ? 1 : 0);
    for (std::size_t j = 0; j < study.parameter_names.size(); ++j) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      out << ',' << format_value(fit.ok ? fit.medians[jj] : nan) << ','
          << format_value(fit.ok ? fit.lo90[jj] : nan) << ','
          << format_value(fit.ok ? fit.hi90[jj] : nan) << ','
          << format_value(fit.ok ? fit.lo95[jj] : nan) << ','
          << format_value(fit.ok ? fit.hi95[jj] : nan);
    }
    out << ',' << quoted(fit.error) << "\n";
  }
}

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> values;
  for (const auto& field : split_fields(text)) {
    values.push_back(parse_number(field, "key " + key));
  }
  return values;
}

bool parse_flag(const std::string& text, const std::string& key) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw std::invalid_argument("key " + key + ": expected a boolean, got '" +
                              text + "'");
}

}  // namespace

ScenarioConfig read_scenario_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::map<std::string, std::string> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trimmed(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << " line " << line_number << ": expected key=value";
      throw std::invalid_argument(msg.str());
    }
    const std::string key = trimmed(text.substr(0, eq));
    const std::string value = trimmed(text.substr(eq + 1));
    if (!entries.emplace(key, value).second) {
      throw std::invalid_argument(path + ": duplicate key '" + key + "'");
    }
  }

  auto take = [&entries](const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return std::pair<bool, std::string>{false, ""};
    std::pair<bool, std::string> out{true, it->second};
    entries.erase(it);
    return out;
  };
  auto number = [&take](const std::string& key, double fallback) {
    const auto [present, text] = take(key);
    return present ? parse_number(text, "key " + key) : fallback;
  };

  const int setting =
      static_cast<int>(number("setting", 1.0));
  double cure = number("cure", 0.25);
  if (cure > 1.0) cure /= 100.0;

  ScenarioConfig config;
  const auto beta0 = take("beta0");
  const auto beta = take("beta");
  const auto gamma = take("gamma");
  const bool custom_truth = beta0.first || beta.first || gamma.first;
  if (custom_truth) {
    if (!(beta0.first && beta.first && gamma.first)) {
      throw std::invalid_argument(
          path + ": beta0, beta and gamma must be given together");
    }
    config.setting = setting;
    config.cure_fraction = cure;
    config.truth.beta0 = parse_number(beta0.second, "key beta0");
    std::vector<double> b = parse_list(beta.second, "beta");
    std::vector<double> g = parse_list(gamma.second, "gamma");
    config.truth.beta = Eigen::Map<Eigen::VectorXd>(
        b.data(), static_cast<Eigen::Index>(b.size()));
    config.truth.gamma = Eigen::Map<Eigen::VectorXd>(
        g.data(), static_cast<Eigen::Index>(g.size()));
    config.t_rcens = setting <= 2 ? 25.0 : (setting == 3 ? 13.7 : 10.6);
  } else {
    config = default_scenario(setting, cure);
  }

  config.sample_size = static_cast<int>(number("n", config.sample_size));
  config.replicates = static_cast<int>(number("replicates", config.replicates));
  {
    const auto [present, text] = take("seed");
    if (present) config.seed = std::strtoull(text.c_str(), nullptr, 10);
  }
  const double mean = number("baseline_mean", 0.0);
  const double sd = number("baseline_sd", 0.0);
  if ((mean > 0.0) != (sd > 0.0)) {
    throw std::invalid_argument(
        path + ": baseline_mean and baseline_sd must be given together");
  }
  if (mean > 0.0) config.baseline = weibull_from_moments(mean, sd);
  config.event_time_cap = number("cap", config.event_time_cap);
  config.t_rcens = number("t_rcens", config.t_rcens);

  config.chain.iterations =
      static_cast<int>(number("iterations", config.chain.iterations));
  config.chain.burnin = static_cast<int>(number("burnin", config.chain.burnin));
  config.chain.adapt_window =
      static_cast<int>(number("adapt_window", config.chain.adapt_window));
  config.chain.target_acceptance =
      number("target_acceptance", config.chain.target_acceptance);
  {
    const auto [present, text] = take("reparametrize");
    if (present) config.chain.reparametrize = parse_flag(text, "reparametrize");
  }
  {
    const auto [present, text] = take("mode_start");
    if (present) config.chain.mode_start = parse_flag(text, "mode_start");
  }

  config.model.num_basis =
      static_cast<int>(number("num_basis", config.model.num_basis));
  config.model.quadrature_bins = static_cast<int>(
      number("quadrature_bins", config.model.quadrature_bins));
  config.model.penalty_order =
      static_cast<int>(number("penalty_order", config.model.penalty_order));
  config.model.penalty_ridge =
      number("penalty_ridge", config.model.penalty_ridge);
  config.model.sigma2_reg = number("sigma2_reg", config.model.sigma2_reg);
  config.model.nu = number("nu", config.model.nu);
  config.model.a_delta = number("a_delta", config.model.a_delta);
  config.model.b_delta = number("b_delta", config.model.b_delta);
  config.model.fixed_phi = number("fixed_phi", config.model.fixed_phi);
  config.curve_points =
      static_cast<int>(number("curve_points", config.curve_points));
  config.curve_thin = static_cast<int>(number("curve_thin", config.curve_thin));

  if (!entries.empty()) {
    throw std::invalid_argument(path + ": unknown key '" +
                                entries.begin()->first + "'");
  }
  validate_scenario(config);
  return config;
}

namespace {

json model_to_json(const ModelConfig& model) {
  return {{"num_basis", model.num_basis},
          {"quadrature_bins", model.quadrature_bins},
          {"penalty_order", model.penalty_order},
          {"penalty_ridge", model.penalty_ridge},
          {"fixed_phi", model.fixed_phi},
          {"sigma2_reg", model.sigma2_reg},
          {"nu", model.nu},
          {"a_delta", model.a_delta},
          {"b_delta", model.b_delta},
          {"t_rcens", model.t_rcens}};
}

ModelConfig model_from_json(const json& j) {
  ModelConfig model;
  model.num_basis = j.at("num_basis").get<int>();
  model.quadrature_bins = j.at("quadrature_bins").get<int>();
  model.penalty_order = j.at("penalty_order").get<int>();
  model.penalty_ridge = j.at("penalty_ridge").get<double>();
  model.fixed_phi = j.at("fixed_phi").get<double>();
  model.sigma2_reg = j.at("sigma2_reg").get<double>();
  model.nu = j.at("nu").get<double>();
  model.a_delta = j.at("a_delta").get<double>();
  model.b_delta = j.at("b_delta").get<double>();
  model.t_rcens = j.at("t_rcens").get<double>();
  return model;
}

json chain_to_json(const ChainConfig& chain) {
  return {{"iterations", chain.iterations},
          {"burnin", chain.burnin},
          {"seed", chain.seed},
          {"target_acceptance", chain.target_acceptance},
          {"adapt_window", chain.adapt_window},
          {"min_scale", chain.min_scale},
          {"max_scale", chain.max_scale},
          {"reparametrize", chain.reparametrize},
          {"mode_start", chain.mode_start},
          {"mode_fixed_delta", chain.mode_fixed_delta},
          {"mode_max_iterations", chain.mode_max_iterations},
          {"mode_gradient_tol", chain.mode_gradient_tol}};
}

ChainConfig chain_from_json(const json& j) {
  ChainConfig chain;
  chain.iterations = j.at("iterations").get<int>();
  chain.burnin = j.at("burnin").get<int>();
  chain.seed = j.at("seed").get<std::uint64_t>();
  chain.target_acceptance = j.at("target_acceptance").get<double>();
  chain.adapt_window = j.at("adapt_window").get<int>();
  chain.min_scale = j.at("min_scale").get<double>();
  chain.max_scale = j.at("max_scale").get<double>();
  chain.reparametrize = j.at("reparametrize").get<bool>();
  chain.mode_start = j.at("mode_start").get<bool>();
  chain.mode_fixed_delta = j.at("mode_fixed_delta").get<double>();
  chain.mode_max_iterations = j.at("mode_max_iterations").get<int>();
  chain.mode_gradient_tol = j.at("mode_gradient_tol").get<double>();
  return chain;
}

std::vector<double> to_list(const Eigen::VectorXd& vec) {
  return std::vector<double>(vec.data(), vec.data() + vec.size());
}

Eigen::VectorXd from_list(const json& j) {
  const std::vector<double> values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json doc;
  doc["subcommand"] = manifest.subcommand;
  doc["status"] = manifest.status;
  doc["seed"] = manifest.seed;
  if (!manifest.input_path.empty()) {
    doc["input"] = {{"path", manifest.input_path},
                    {"fnv1a64", hex64(manifest.input_hash)}};
  }
  doc["model"] = model_to_json(manifest.model);
  doc["chain"] = chain_to_json(manifest.chain);
  if (manifest.has_scenario) {
    const ScenarioConfig& s = manifest.scenario;
    doc["scenario"] = {
        {"setting", s.setting},
        {"cure_fraction", s.cure_fraction},
        {"sample_size", s.sample_size},
        {"replicates", s.replicates},
        {"seed", s.seed},
        {"truth",
         {{"beta0", s.truth.beta0},
          {"beta", to_list(s.truth.beta)},
          {"gamma", to_list(s.truth.gamma)}}},
        {"baseline", {{"shape", s.baseline.shape}, {"scale", s.baseline.scale}}},
        {"event_time_cap", s.event_time_cap},
        {"t_rcens", s.t_rcens},
        {"curve_points", s.curve_points},
        {"curve_thin", s.curve_thin}};
  }
  if (manifest.has_contrast) {
    const ResolvedContrast& c = manifest.contrast;
    doc["contrast"] = {{"covariate", c.covariate},
                       {"high", c.high},
                       {"low", c.low},
                       {"group",
                        {{"x", to_list(c.group.x)}, {"z", to_list(c.group.z)}}},
                       {"reference",
                        {{"x", to_list(c.reference.x)},
                         {"z", to_list(c.reference.z)}}}};
  }
  doc["outputs"] = manifest.outputs;
  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in = open_for_read(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(path + ": " + err.what());
  }
  RunManifest manifest;
  manifest.subcommand = doc.at("subcommand").get<std::string>();
  manifest.status = doc.at("status").get<std::string>();
  manifest.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("input")) {
    manifest.input_path = doc["input"].at("path").get<std::string>();
    manifest.input_hash =
        parse_hex64(doc["input"].at("fnv1a64").get<std::string>());
  }
  manifest.model = model_from_json(doc.at("model"));
  manifest.chain = chain_from_json(doc.at("chain"));
  if (doc.contains("scenario")) {
    manifest.has_scenario = true;
    const json& s = doc["scenario"];
    ScenarioConfig& config = manifest.scenario;
    config.setting = s.at("setting").get<int>();
    config.cure_fraction = s.at("cure_fraction").get<double>();
    config.sample_size = s.at("sample_size").get<int>();
    config.replicates = s.at("replicates").get<int>();
    config.seed = s.at("seed").get<std::uint64_t>();
    config.truth.beta0 = s.at("truth").at("beta0").get<double>();
    config.truth.beta = from_list(s.at("truth").at("beta"));
    config.truth.gamma = from_list(s.at("truth").at("gamma"));
    config.baseline.shape = s.at("baseline").at("shape").get<double>();
    config.baseline.scale = s.at("baseline").at("scale").get<double>();
    config.event_time_cap = s.at("event_time_cap").get<double>();
    config.t_rcens = s.at("t_rcens").get<double>();
    config.curve_points = s.at("curve_points").get<int>();
    config.curve_thin = s.at("curve_thin").get<int>();
    config.model = manifest.model;
    config.chain = manifest.chain;
  }
  if (doc.contains("contrast")) {
    manifest.has_contrast = true;
    const json& c = doc["contrast"];
    manifest.contrast.covariate = c.at("covariate").get<std::string>();
    manifest.contrast.high = c.at("high").get<double>();
    manifest.contrast.low = c.at("low").get<double>();
    manifest.contrast.group.x = from_list(c.at("group").at("x"));
    manifest.contrast.group.z = from_list(c.at("group").at("z"));
    manifest.contrast.reference.x = from_list(c.at("reference").at("x"));
    manifest.contrast.reference.z = from_list(c.at("reference").at("z"));
  }
  if (doc.contains("outputs")) {
    manifest.outputs = doc["outputs"].get<std::vector<std::string>>();
  }
  return manifest;
}

}  // namespace ptcure::io
