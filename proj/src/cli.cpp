#include "dmpkit/cli.hpp"

#include "dmpkit/bench.hpp"
#include "dmpkit/dmp.hpp"
#include "dmpkit/error.hpp"
#include "dmpkit/io.hpp"
#include "dmpkit/regress.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace dmpkit {

namespace {

namespace fs = std::filesystem;

Eigen::VectorXd parse_vector(const std::string& text, const char* what) {
  std::vector<double> values;
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view field = rest.substr(0, comma);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    require(ec == std::errc() && end == field.data() + field.size() && !field.empty(),
            ErrorKind::InvalidArgument,
            std::string("--") + what + ": '" + text + "' is not a comma-separated list of numbers");
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  const Eigen::VectorXd v = parse_vector(text, what);
  std::vector<int> out;
  for (double x : v) {
    require(x == std::floor(x) && x >= 0 && x < 1e7, ErrorKind::InvalidArgument,
            std::string("--") + what + " expects non-negative integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<std::string> parse_labels(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  require(static_cast<bool>(file), ErrorKind::InvalidArgument, "cannot write " + path);
  write(file);
}

struct LearnFlags {
  std::string basis = "mollifier";
  int n = 50;
  double k = 150.0;
  std::optional<double> d;
  double alpha = 4.0;
  double overlap = 1.0;
  double kappa = 3.0;
  bool biased = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--basis", basis, "gaussian | truncated_gaussian | mollifier | wendland_2..8")
        ->capture_default_str();
    cmd->add_option("--n", n, "N (N + 1 basis functions)")->capture_default_str();
    cmd->add_option("--k", k, "elastic gain K")->capture_default_str();
    cmd->add_option("--d", d, "damping gain D (default 2 sqrt(K))");
    cmd->add_option("--alpha", alpha, "phase decay rate")->capture_default_str();
    cmd->add_option("--overlap", overlap, "width factor")->capture_default_str();
    cmd->add_option("--kappa", kappa, "truncated-Gaussian cutoff factor")->capture_default_str();
    cmd->add_flag("--biased", biased, "add bias regressors");
  }

  BasisFamily family() const {
    BasisFamily f = BasisFamily::parse(basis);
    f.trunc_kappa = kappa;
    return f;
  }

  Gains gains(int dims) const {
    Gains g = Gains::critically_damped(k, dims);
    if (d) g.damping.setConstant(*d);
    g.validate();
    return g;
  }
};

int run_learn(const std::string& csv, const LearnFlags& flags, const std::string& out_path,
              std::ostream& out) {
  const Trajectory traj = read_trajectory_csv(fs::path(csv));
  const double horizon = traj.duration();
  const PhaseConfig phase{flags.alpha, 1.0, horizon};
  phase.validate();
  const BasisSet basis =
      BasisSet::make(flags.family(), flags.n, flags.alpha, horizon, flags.overlap, flags.biased);
  const DmpModel model = learn_dmp(traj, flags.gains(traj.dims()), phase, basis);
  emit(out_path, out, [&](std::ostream& o) { o << dump_model(model); });
  return kExitOk;
}

struct RolloutFlags {
  std::string model;
  std::string x0;
  std::string goal;
  std::string goal_path;
  std::string formulation = "classical";
  std::string transform;
  double tau = 1.0;
  double duration = 0.0;
  double dt = 0.0;
  std::string out;
};

int run_rollout(const RolloutFlags& f, std::ostream& out) {
  const DmpModel model = load_model(fs::path(f.model));
  const int d = model.dims();
  const Eigen::VectorXd x0 = f.x0.empty() ? model.learned_x0 : parse_vector(f.x0, "x0");

  Goal goal;
  if (!f.goal_path.empty()) {
    const Trajectory path = read_trajectory_csv(fs::path(f.goal_path));
    require(path.dims() == d, ErrorKind::InvalidArgument,
            "goal path dimension does not match the model");
    goal = GoalPath([path](double t) { return path.position_at(t); });
  } else {
    goal = f.goal.empty() ? model.learned_g : parse_vector(f.goal, "goal");
  }

  RolloutOptions opts;
  opts.tau = f.tau;
  opts.duration = f.duration;
  opts.dt = f.dt;
  opts.formulation = Formulation::parse(f.formulation);
  if (!f.transform.empty()) {
    require(opts.formulation.tag == Formulation::Tag::Extended, ErrorKind::InvalidArgument,
            "--transform requires --formulation extended");
    const Eigen::VectorXd flat = parse_vector(f.transform, "transform");
    require(flat.size() == d * d, ErrorKind::InvalidArgument,
            "--transform needs d*d = " + std::to_string(d * d) + " row-major entries");
    Eigen::MatrixXd s(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) s(r, c) = flat(r * d + c);
    }
    require(std::abs(s.determinant()) > 0.0, ErrorKind::NullTransform,
            "--transform is singular");
    opts.formulation.transform = s;
  }

  const Trajectory traj = rollout(model, x0, goal, opts);
  emit(f.out, out, [&](std::ostream& o) { write_trajectory_csv(o, traj); });
  return kExitOk;
}

int run_update(const std::string& model_path, const std::string& csv, double t0, double t1,
               const std::string& out_path, std::ostream& out, std::ostream& err) {
  const DmpModel model = load_model(fs::path(model_path));
  const Trajectory traj = read_trajectory_csv(fs::path(csv));
  const UpdateResult res = update_segment(model, traj, t0, t1);
  std::ostringstream indices;
  for (std::size_t i = 0; i < res.indices.size(); ++i) indices << (i ? "," : "") << res.indices[i];
  if (out_path.empty() || out_path == "-") {
    out << dump_model(res.model);
    err << "updated indices: " << indices.str() << '\n';
  } else {
    save_model(fs::path(out_path), res.model);
    out << "updated indices: " << indices.str() << '\n';
  }
  return kExitOk;
}

int run_regress(const std::string& dir, const LearnFlags& flags, double horizon,
                const std::string& out_path, std::ostream& out) {
  require(fs::is_directory(dir), ErrorKind::InvalidArgument, dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  require(!files.empty(), ErrorKind::InvalidArgument, "no .csv demos in " + dir);
  DemoSet set;
  for (const auto& p : files) set.demos.push_back(read_trajectory_csv(p));

  const PhaseConfig phase{flags.alpha, 1.0, horizon};
  phase.validate();
  const BasisSet basis =
      BasisSet::make(flags.family(), flags.n, flags.alpha, horizon, flags.overlap, flags.biased);
  const DmpModel model =
      regress_weights(align_demos(set, horizon), flags.gains(set.dims()), phase, basis);
  emit(out_path, out, [&](std::ostream& o) { o << dump_model(model); });
  return kExitOk;
}

struct BenchFlags {
  std::string sweep;
  std::string families;
  std::string n;
  std::string target = "hat_eta";
  int samples = 1001;
  int rhs = 30;
  double alpha = 4.0;
  double overlap = 1.0;
  double k = 150.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string json;
};

int run_bench(const BenchFlags& f, std::ostream& out) {
  SweepSettings settings;
  settings.alpha = f.alpha;
  settings.overlap = f.overlap;
  settings.elastic = f.k;
  settings.seed = f.seed;
  settings.threads = bench_threads_from_env();

  auto family_list = [&](const std::string& fallback) {
    std::vector<SweepFamily> fams;
    for (const auto& label : parse_labels(f.families.empty() ? fallback : f.families)) {
      fams.push_back(SweepFamily::parse(label));
    }
    require(!fams.empty(), ErrorKind::InvalidArgument, "--families is empty");
    return fams;
  };
  auto n_list = [&](const std::string& fallback) {
    return parse_ints(f.n.empty() ? fallback : f.n, "n");
  };
  const std::string all =
      "gaussian,truncated_gaussian,truncated_gaussian_biased,mollifier,wendland_2,wendland_3,"
      "wendland_4,wendland_5,wendland_6,wendland_7,wendland_8";

  SweepReport report;
  if (f.sweep == "error") {
    const Trajectory target = gen_target(parse_target_kind(f.target), f.samples);
    settings.horizon = target.duration();
    report = run_error_sweep(family_list(all), n_list("10,20,30,40,50,60,70,80,90,100"), target,
                             settings);
  } else if (f.sweep == "condition") {
    report = run_condition_sweep(family_list(all), n_list("20,40,80,160"), settings);
  } else if (f.sweep == "timing") {
    report = run_timing_sweep(family_list("gaussian,mollifier"), n_list("64,128,256,512"), f.rhs,
                              settings);
  } else if (f.sweep == "sparsity") {
    const auto fams = family_list("mollifier");
    for (const auto& fam : fams) {
      const SweepReport part = run_sparsity(fam, n_list("64,128,256"), settings);
      report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
      report.alpha = part.alpha;
      report.horizon = part.horizon;
      report.overlap = part.overlap;
      report.seed = part.seed;
    }
  } else {
    fail(ErrorKind::InvalidArgument,
         "unknown sweep '" + f.sweep + "' (expected error, condition, timing or sparsity)");
  }
  emit(f.out, out, [&](std::ostream& o) { report.write_csv(o); });
  if (!f.json.empty()) emit(f.json, out, [&](std::ostream& o) { report.write_json(o); });
  return kExitOk;
}

struct GenFlags {
  std::string what;
  int count = 50;
  std::uint64_t seed = 0;
  std::optional<double> noise;
  std::string kind = "hat_eta";
  int samples = 1001;
  std::string out;
};

int run_gen(const GenFlags& f, std::ostream& out) {
  if (f.what == "limit-cycle") {
    require(!f.out.empty(), ErrorKind::InvalidArgument, "gen limit-cycle needs --out <dir>");
    DemoSet set = gen_limit_cycle_dataset(f.count, f.seed);
    if (f.noise) set = add_noise(set, *f.noise, f.seed);
    fs::create_directories(f.out);
    for (std::size_t j = 0; j < set.demos.size(); ++j) {
      char name[32];
      std::snprintf(name, sizeof name, "demo_%03zu.csv", j);
      write_trajectory_csv(fs::path(f.out) / name, set.demos[j]);
    }
    out << "wrote " << set.demos.size() << " demos to " << f.out << '\n';
  } else if (f.what == "target") {
    const Trajectory t = gen_target(parse_target_kind(f.kind), f.samples);
    emit(f.out, out, [&](std::ostream& o) { write_trajectory_csv(o, t); });
  } else if (f.what == "update-pair") {
    require(!f.out.empty(), ErrorKind::InvalidArgument, "gen update-pair needs --out <dir>");
    const UpdatePair pair = gen_update_pair(f.samples);
    fs::create_directories(f.out);
    write_trajectory_csv(fs::path(f.out) / "original.csv", pair.original);
    write_trajectory_csv(fs::path(f.out) / "modified.csv", pair.modified);
    out << "wrote original.csv and modified.csv (window " << pair.t0 << ".." << pair.t1
        << ") to " << f.out << '\n';
  } else {
    fail(ErrorKind::InvalidArgument,
         "unknown dataset '" + f.what + "' (expected limit-cycle, target or update-pair)");
  }
  return kExitOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic movement primitives: learn, roll out, update, regress, benchmark"};
  app.name("dmpkit");
  app.require_subcommand(1);

  std::string csv_path, model_path, dir_path, out_path;
  LearnFlags learn_flags;
  auto* learn = app.add_subcommand("learn", "learn a model from a trajectory CSV");
  learn->add_option("trajectory", csv_path, "trajectory CSV (t,x1,...,xd)")->required();
  learn_flags.add_to(learn);
  learn->add_option("--out,-o", out_path, "model JSON (default stdout)");

  RolloutFlags ro;
  auto* roll = app.add_subcommand("rollout", "integrate a model to a trajectory CSV");
  roll->add_option("model", ro.model, "model JSON")->required();
  roll->add_option("--x0", ro.x0, "start, comma separated (default learned start)");
  auto* goal_opt = roll->add_option("--goal", ro.goal, "goal, comma separated (default learned goal)");
  roll->add_option("--goal-path", ro.goal_path, "moving goal as a trajectory CSV")->excludes(goal_opt);
  roll->add_option("--formulation", ro.formulation, "original | classical | extended")
      ->capture_default_str();
  roll->add_option("--transform", ro.transform, "fixed extended-mode transform, row-major");
  roll->add_option("--tau", ro.tau, "temporal scaling")->capture_default_str();
  roll->add_option("--duration", ro.duration, "integration time (default 2T)");
  roll->add_option("--dt", ro.dt, "step (default T/1000)");
  roll->add_option("--out,-o", ro.out, "trajectory CSV (default stdout)");

  std::string update_csv;
  double t0 = 0.0, t1 = 0.0;
  auto* upd = app.add_subcommand("update", "re-learn the weights covering a time window");
  upd->add_option("model", model_path, "model JSON")->required();
  upd->add_option("trajectory", update_csv, "new demonstration CSV")->required();
  upd->add_option("--t0", t0, "window start")->required();
  upd->add_option("--t1", t1, "window end")->required();
  upd->add_option("--out,-o", out_path, "updated model JSON (default stdout)");

  LearnFlags regress_flags;
  double horizon = 1.0;
  auto* reg = app.add_subcommand("regress", "regress one model over a directory of demos");
  reg->add_option("demos", dir_path, "directory of trajectory CSVs")->required();
  regress_flags.add_to(reg);
  reg->add_option("--horizon", horizon, "common time horizon T")->capture_default_str();
  reg->add_option("--out,-o", out_path, "model JSON (default stdout)");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "run a benchmark sweep");
  bench->add_option("sweep", bf.sweep, "error | condition | timing | sparsity")->required();
  bench->add_option("--families", bf.families, "comma-separated family labels");
  bench->add_option("--n", bf.n, "comma-separated N values");
  bench->add_option("--target", bf.target, "error sweep target")->capture_default_str();
  bench->add_option("--samples", bf.samples, "target samples")->capture_default_str();
  bench->add_option("--rhs", bf.rhs, "right-hand sides per timing cell")->capture_default_str();
  bench->add_option("--alpha", bf.alpha, "phase decay rate")->capture_default_str();
  bench->add_option("--overlap", bf.overlap, "width factor")->capture_default_str();
  bench->add_option("--k", bf.k, "elastic gain for the error sweep")->capture_default_str();
  bench->add_option("--seed", bf.seed, "seed")->capture_default_str();
  bench->add_option("--out,-o", bf.out, "report CSV (default stdout)");
  bench->add_option("--json", bf.json, "also write the report as JSON");

  GenFlags gf;
  auto* gen = app.add_subcommand("gen", "generate synthetic data");
  gen->add_option("dataset", gf.what, "limit-cycle | target | update-pair")->required();
  gen->add_option("--count", gf.count, "number of demos")->capture_default_str();
  gen->add_option("--seed", gf.seed, "seed")->capture_default_str();
  gen->add_option("--noise", gf.noise, "add N(0, variance) noise");
  gen->add_option("--kind", gf.kind, "hat_eta | plane_curve | spiral_curve")->capture_default_str();
  gen->add_option("--samples,--n", gf.samples, "samples per target")->capture_default_str();
  gen->add_option("--out,-o", gf.out, "output file or directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dmpkit: usage error: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }

  try {
    if (*learn) return run_learn(csv_path, learn_flags, out_path, out);
    if (*roll) return run_rollout(ro, out);
    if (*upd) return run_update(model_path, update_csv, t0, t1, out_path, out, err);
    if (*reg) return run_regress(dir_path, regress_flags, horizon, out_path, out);
    if (*bench) return run_bench(bf, out);
    if (*gen) return run_gen(gf, out);
  } catch (const Error& e) {
    err << "dmpkit: " << error_name(e.kind()) << ": " << one_line(e.what()) << '\n';
    return is_numerical(e.kind()) ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    err << "dmpkit: error: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace dmpkit
