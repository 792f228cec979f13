#include "dmpkit/io.hpp"

#include "dmpkit/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dmpkit {

namespace {

using json = nlohmann::ordered_json;

double parse_double(std::string_view text, int line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    fail(ErrorKind::MalformedInput,
         "line " + std::to_string(line) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) arr.push_back(vector_json(m.row(r).transpose()));
  return arr;
}

Eigen::VectorXd vector_from(const json& j, Eigen::Index expected, const char* what) {
  require(j.is_array() && (expected < 0 || static_cast<Eigen::Index>(j.size()) == expected),
          ErrorKind::MalformedInput, std::string("model field '") + what + "' has the wrong shape");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  require(j.is_array() && static_cast<Eigen::Index>(j.size()) == rows, ErrorKind::MalformedInput,
          std::string("model field '") + what + "' has the wrong shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = vector_from(j[r], cols, what).transpose();
  return m;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  // header
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line != "\r") break;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  require(header.size() >= 2 && header.front() == "t", ErrorKind::MalformedInput,
          "trajectory CSV must start with a header 't,x1,...,xd'");
  const auto dims = static_cast<int>(header.size()) - 1;

  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    require(static_cast<int>(fields.size()) == dims + 1, ErrorKind::MalformedInput,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(dims + 1) +
                " fields, got " + std::to_string(fields.size()));
    times.push_back(parse_double(fields[0], line_no));
    for (int p = 0; p < dims; ++p) values.push_back(parse_double(fields[p + 1], line_no));
  }

  Trajectory tr;
  tr.times = std::move(times);
  tr.positions.resize(static_cast<Eigen::Index>(tr.times.size()), dims);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    for (int p = 0; p < dims; ++p) {
      tr.positions(static_cast<Eigen::Index>(k), p) = values[k * dims + p];
    }
  }
  tr.validate(2);
  return tr;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::MalformedInput, "cannot open " + path.string());
  return read_trajectory_csv(in);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (int p = 0; p < traj.dims(); ++p) out << ",x" << (p + 1);
  out << '\n';
  for (int k = 0; k < traj.samples(); ++k) {
    out << format_double(traj.times[k]);
    for (int p = 0; p < traj.dims(); ++p) out << ',' << format_double(traj.positions(k, p));
    out << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write " + path.string());
  write_trajectory_csv(out, traj);
}

json model_to_json(const DmpModel& model) {
  const BasisSet& b = model.basis;
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["dims"] = model.dims();
  j["gains"] = {{"elastic", vector_json(model.gains.elastic)},
                {"damping", vector_json(model.gains.damping)}};
  j["phase"] = {{"alpha", model.phase.alpha},
                {"tau", model.phase.tau},
                {"horizon", model.phase.horizon}};
  j["basis"] = {{"family", b.family().label()},
                {"n", b.size() - 1},
                {"overlap", b.overlap()},
                {"trunc_kappa", b.family().trunc_kappa},
                {"biased", b.biased()},
                {"centers", b.centers()},
                {"widths", b.widths()}};
  j["weights"] = matrix_json(model.weights);
  if (b.biased()) j["biases"] = matrix_json(model.biases);
  j["learned_x0"] = vector_json(model.learned_x0);
  j["learned_g"] = vector_json(model.learned_g);
  return j;
}

DmpModel model_from_json(const json& j) {
  try {
    require(j.is_object(), ErrorKind::MalformedInput, "model file is not a JSON object");
    const int version = j.at("schema_version").get<int>();
    require(version == kModelSchemaVersion, ErrorKind::MalformedInput,
            "unsupported model schema version " + std::to_string(version));
    const int d = j.at("dims").get<int>();
    require(d >= 1, ErrorKind::MalformedInput, "model dims must be positive");

    DmpModel m;
    m.gains.elastic = vector_from(j.at("gains").at("elastic"), d, "gains.elastic");
    m.gains.damping = vector_from(j.at("gains").at("damping"), d, "gains.damping");
    m.gains.validate();
    const json& ph = j.at("phase");
    m.phase = {ph.at("alpha").get<double>(), ph.at("tau").get<double>(),
               ph.at("horizon").get<double>()};
    m.phase.validate();

    const json& bj = j.at("basis");
    BasisFamily family = BasisFamily::parse(bj.at("family").get<std::string>());
    family.trunc_kappa = bj.at("trunc_kappa").get<double>();
    const int n = bj.at("n").get<int>();
    auto centers = bj.at("centers").get<std::vector<double>>();
    auto widths = bj.at("widths").get<std::vector<double>>();
    require(static_cast<int>(centers.size()) == n + 1, ErrorKind::MalformedInput,
            "basis center count does not match n");
    const bool biased = bj.at("biased").get<bool>();
    m.basis = BasisSet(family, std::move(centers), std::move(widths),
                       bj.at("overlap").get<double>(), biased);

    m.weights = matrix_from(j.at("weights"), d, n + 1, "weights");
    if (biased) m.biases = matrix_from(j.at("biases"), d, n + 1, "biases");
    m.learned_x0 = vector_from(j.at("learned_x0"), d, "learned_x0");
    m.learned_g = vector_from(j.at("learned_g"), d, "learned_g");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedInput, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedInput) throw;
    fail(ErrorKind::MalformedInput, std::string("malformed model file: ") + e.what());
  }
}

std::string dump_model(const DmpModel& model) { return model_to_json(model).dump(2) + "\n"; }

void save_model(const std::filesystem::path& path, const DmpModel& model) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << dump_model(model);
}

DmpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::MalformedInput, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::MalformedInput, "cannot parse " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace dmpkit
