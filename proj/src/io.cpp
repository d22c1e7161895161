#include "fxtflow/io.hpp"

#include "fxtflow/error.hpp"
#include "fxtflow/problems.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fxt {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Usage, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Usage, "cannot write '" + path + "'");
  out << text;
  require(static_cast<bool>(out), ErrorKind::Usage, "write failed for '" + path + "'");
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  std::string s = pos == std::string::npos ? line : line.substr(0, pos);
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

std::vector<double> numbers_in(std::string line) {
  for (char& c : line)
    if (c == ',' || c == ';' || c == '\t') c = ' ';
  std::vector<double> out;
  std::istringstream tokens(line);
  std::string token;
  while (tokens >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    require(end && *end == '\0', ErrorKind::Validation, "not a number: '" + token + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json vector_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  traj.validate();
  const int n = traj.empty() ? 0 : static_cast<int>(traj.states.front().size());
  std::string out = "t";
  for (int i = 0; i < n; ++i) out += ",x_" + std::to_string(i);
  out += ",f,grad_norm\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out += format_double(traj.times[k]);
    for (int i = 0; i < n; ++i) out += "," + format_double(traj.states[k][i]);
    out += "," + format_double(traj.costs[k]) + "," + format_double(traj.grad_norms[k]) + "\n";
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  dump(path, trajectory_csv(traj));
}

Trajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Validation, "empty trajectory file");
  const auto header = split_commas(line);
  require(header.size() >= 3 && header.front() == "t" && header[header.size() - 2] == "f" &&
              header.back() == "grad_norm",
          ErrorKind::Validation, "unexpected trajectory header");
  const std::size_t n = header.size() - 3;
  for (std::size_t i = 0; i < n; ++i)
    require(header[i + 1] == "x_" + std::to_string(i), ErrorKind::Validation,
            "unexpected column '" + header[i + 1] + "'");
  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_commas(line);
    require(cells.size() == header.size(), ErrorKind::Validation, "ragged trajectory row");
    std::vector<double> v;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double d = std::strtod(c.c_str(), &end);
      require(end && *end == '\0' && !c.empty(), ErrorKind::Validation, "not a number: '" + c + "'");
      v.push_back(d);
    }
    traj.times.push_back(v[0]);
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = v[i + 1];
    traj.states.push_back(x);
    traj.costs.push_back(v[n + 1]);
    traj.grad_norms.push_back(v[n + 2]);
  }
  traj.validate();
  return traj;
}

Trajectory read_trajectory_csv(const std::string& path) { return parse_trajectory_csv(slurp(path)); }

void write_summary(const std::string& path, const Summary& summary) {
  std::string out;
  for (const auto& [k, v] : summary) {
    require(k.find('=') == std::string::npos && k.find('\n') == std::string::npos &&
                v.find('\n') == std::string::npos,
            ErrorKind::Validation, "summary keys and values must be single-line, keys without '='");
    out += k + "=" + v + "\n";
  }
  dump(path, out);
}

Summary read_summary(const std::string& path) {
  std::istringstream in(slurp(path));
  Summary out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto pos = line.find('=');
    require(pos != std::string::npos, ErrorKind::Validation, "summary line without '='");
    out.emplace_back(line.substr(0, pos), line.substr(pos + 1));
  }
  return out;
}

Matrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    const std::string s = strip_comment(line);
    if (s.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(numbers_in(s));
    require(rows.back().size() == rows.front().size(), ErrorKind::Validation,
            "matrix rows have different lengths");
  }
  require(!rows.empty(), ErrorKind::Validation, "matrix file has no data");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Matrix read_matrix_csv(const std::string& path) { return parse_matrix_csv(slurp(path)); }

Vector read_vector_csv(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line;
  std::vector<double> all;
  while (std::getline(in, line)) {
    for (double v : numbers_in(strip_comment(line))) all.push_back(v);
  }
  require(!all.empty(), ErrorKind::Validation, "vector file has no data");
  return Eigen::Map<Vector>(all.data(), static_cast<Eigen::Index>(all.size()));
}

Graph read_edge_list_csv(const std::string& path, int nodes) {
  std::istringstream in(slurp(path));
  std::string line;
  std::vector<Edge> edges;
  int max_id = -1;
  while (std::getline(in, line)) {
    const std::string s = strip_comment(line);
    if (s.find_first_not_of(" \t") == std::string::npos) continue;
    const auto v = numbers_in(s);
    require(v.size() == 2 || v.size() == 3, ErrorKind::Validation, "edge line needs u,v[,weight]");
    require(v[0] == std::floor(v[0]) && v[1] == std::floor(v[1]) && v[0] >= 0 && v[1] >= 0,
            ErrorKind::Validation, "edge endpoints must be nonnegative integers");
    Edge e{static_cast<int>(v[0]), static_cast<int>(v[1]), v.size() == 3 ? v[2] : 1.0};
    max_id = std::max({max_id, e.u, e.v});
    edges.push_back(e);
  }
  return Graph(nodes > 0 ? nodes : max_id + 1, std::move(edges));
}

std::vector<int> read_block_sizes(const std::string& path) {
  const Vector v = read_vector_csv(path);
  std::vector<int> out;
  for (double x : v) {
    require(x >= 1 && x == std::floor(x), ErrorKind::Validation, "block sizes must be positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::string instance_json(const CaseInstance& inst) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["case"] = inst.id;
  j["title"] = inst.title;
  j["seed"] = inst.seed;
  for (const auto& [name, m] : inst.data) j["data"][name] = matrix_json(m);
  for (const auto& [name, v] : inst.scalars) j["scalars"][name] = v;
  for (const auto& [name, v] : inst.notes) j["notes"][name] = v;
  if (inst.reference_solution) j["reference_solution"] = vector_json(*inst.reference_solution);
  if (inst.reference_value) j["reference_value"] = *inst.reference_value;
  for (const auto& m : inst.methods) {
    nlohmann::json mj;
    mj["name"] = m.name;
    mj["flow"] = to_string(m.flow.variant);
    mj["description"] = m.flow.description;
    mj["disturbance"] = to_string(m.disturbance.kind);
    mj["dt"] = m.integrator.dt;
    mj["t_max"] = m.integrator.t_max;
    mj["settle_tol"] = m.integrator.settle_tol;
    mj["record_stride"] = m.integrator.record_stride;
    nlohmann::json inits = nlohmann::json::array();
    for (const auto& x0 : m.initial_states) inits.push_back(vector_json(x0));
    mj["initial_states"] = inits;
    if (m.bound) {
      mj["bound"]["value"] = std::isfinite(m.bound->value) ? nlohmann::json(m.bound->value)
                                                           : nlohmann::json("inf");
      mj["bound"]["source"] = m.bound->source;
    }
    j["methods"].push_back(mj);
  }
  return j.dump(2) + "\n";
}

void write_instance_json(const std::string& path, const CaseInstance& inst) {
  dump(path, instance_json(inst));
}

}  // namespace fxt
