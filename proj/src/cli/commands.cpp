#include "matte/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "matte/analysis.hpp"
#include "matte/gradcheck.hpp"
#include "matte/metrics.hpp"
#include "matte/png_io.hpp"
#include "matte/trimap.hpp"

namespace matte::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kGradcheckTolerance = 1e-4;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

ImagePlane random_image(std::mt19937_64& rng, int height, int width, int channels) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImagePlane::Pixels px(static_cast<Eigen::Index>(height) * width, channels);
  for (Eigen::Index i = 0; i < px.size(); ++i) px.data()[i] = u(rng);
  return ImagePlane(height, width, std::move(px));
}

Field random_field(std::mt19937_64& rng, int height, int width, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Field f(height, width);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
  return f;
}

Trimap random_trimap(std::mt19937_64& rng, int height, int width) {
  std::uniform_int_distribution<int> pick(0, 2);
  std::vector<Label> labels(static_cast<std::size_t>(height) * width);
  for (Label& l : labels) l = static_cast<Label>(pick(rng));
  return Trimap(height, width, std::move(labels));
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string image;
  std::string trimap;
  std::string output;
  std::string trace;
  std::string config;
  std::string dir;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> given;
};

SolveOptions resolve_options(const SolveArgs& a) {
  SolveOptions options;
  if (!a.config.empty()) {
    for (const auto& [key, value] : read_config_file(a.config)) set_option(options, key, value);
  }
  for (const auto& [key, opt] : a.given) {
    if (opt->count() == 0) continue;
    set_option(options, key, key == "deep" ? "true" : a.raw.at(key));
  }
  options.solver.validate();
  return options;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const SolveOptions options = resolve_options(a);
  if (a.dir.empty()) {
    if (a.image.empty() || a.trimap.empty()) throw ParameterError("solve needs IMAGE and TRIMAP, or --dir");
    const fs::path trace = a.trace.empty() ? fs::path(a.output).replace_extension(".json") : fs::path(a.trace);
    solve_file(a.image, a.trimap, a.output, trace, options, out);
    return kOk;
  }

  // Batch layout: DIR/image/NAME.png pairs with DIR/trimap/NAME.png.
  const fs::path root(a.dir);
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(root / "image")) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") names.push_back(entry.path().filename());
  }
  std::sort(names.begin(), names.end());
  fs::create_directories(a.output);

  int code = kOk;
  for (const fs::path& name : names) {
    const fs::path alpha = fs::path(a.output) / name;
    try {
      solve_file(root / "image" / name, root / "trimap" / name, alpha, fs::path(alpha).replace_extension(".json"),
                 options, out);
    } catch (const NumericalError& e) {
      err << name.string() << ": numerical failure: " << e.what() << '\n';
      code = kNumericalFailure;
    } catch (const std::exception& e) {
      err << name.string() << ": " << e.what() << '\n';
      code = std::max<int>(code, kUsageError);
    }
  }
  out << "processed " << names.size() << " file(s)\n";
  return code;
}

// ---------------------------------------------------------------- trimap

struct TrimapArgs {
  std::string alpha;
  std::string output;
  int kernel = 1;
  std::vector<int> range;
  std::uint64_t seed = 0;
  double delta = 1.0 / 255.0;
};

int cmd_trimap(const TrimapArgs& a, std::ostream& out) {
  ErosionSpec spec;
  spec.seed = a.seed;
  spec.delta = a.delta;
  if (a.range.empty()) spec.kernel = FixedKernel{a.kernel};
  else spec.kernel = RandomKernel{a.range[0], a.range[1]};
  spec.validate();

  const AlphaMatte alpha(read_alpha(a.alpha));
  const Trimap trimap = trimap_from_alpha(alpha, spec);
  write_trimap(a.output, trimap);
  out << "kernel " << draw_kernel(spec) << ", unknown pixels " << trimap.unknown_count() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string trimap;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Field pred = read_alpha(a.pred);
  const Field gt = read_alpha(a.gt);
  const Trimap trimap = read_trimap(a.trimap);
  require_same_shape(pred, gt, "prediction vs ground truth");
  out << to_json(evaluate(pred, gt, trimap)) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- analyze

struct BrakingArgs {
  std::string form = "quadratic";
  int window = 5;
  int length = 30;
};

int cmd_braking(const BrakingArgs& a, std::ostream& out) {
  static const std::map<std::string, std::vector<double>> forms{
      {"constant", {1.0}}, {"linear", {1.0, 2.0}}, {"quadratic", {3.0, 2.0, 1.0}}, {"cubic", {0.0, 0.0, 0.0, 1.0}}};
  const auto it = forms.find(a.form);
  if (it == forms.end()) throw ParameterError("unknown sequence form '" + a.form + "'");
  const std::vector<double> seq = polynomial_sequence(it->second, a.length);
  const BrakingReport r = braking_residual(seq, a.window);

  out << "t residual\n";
  for (std::size_t i = 0; i < r.residuals.size(); ++i)
    out << (a.window + 1 + static_cast<int>(i)) << ' ' << fmt("%.3e", r.residuals[i]) << '\n';
  out << "max |residual|: " << fmt("%.3e", r.max_abs_residual) << '\n';
  out << "form gap: " << fmt("%.3e", r.max_form_gap) << '\n';
  return kOk;
}

struct BoundsArgs {
  int samples = 100;
  int size = 8;
  std::vector<int> windows{3, 5, 7, 11};
  std::uint64_t seed = 0;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  if (a.samples < 1 || a.size < 1) throw ParameterError("samples and size must be positive");
  std::mt19937_64 rng(a.seed);
  PairBoundReport total;
  total.worst_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < a.samples; ++s) {
    const ImagePlane image = random_image(rng, a.size, a.size, 3);
    const Field alpha = random_field(rng, a.size, a.size, 0.0, 1.0);
    for (int k : a.windows) {
      const PairBoundReport r = pair_bound_check(image, alpha, build_neighbor_field(image, k));
      total.mutual_pairs += r.mutual_pairs;
      total.violations += r.violations;
      total.non_tight += r.non_tight;
      total.worst_slack = std::min(total.worst_slack, r.worst_slack);
    }
  }
  out << "instances: " << a.samples << '\n'
      << "mutual pairs: " << total.mutual_pairs << '\n'
      << "non-tight: " << total.non_tight << '\n'
      << "violations: " << total.violations << '\n'
      << "worst slack: " << fmt("%.3e", total.worst_slack) << '\n';
  return kOk;
}

struct SymmetryArgs {
  int window = 5;
  double slope = 0.05;
  double offset = 0.2;
};

int cmd_symmetry(const SymmetryArgs& a, std::ostream& out) {
  out << "max asymmetry: " << fmt("%.3e", symmetry_check(a.window, a.slope, a.offset)) << '\n';
  return kOk;
}

struct SynthArgs {
  std::string kind = "ramp";
  int ramp_width = 6;
  int length = 20;
  int thickness = 1;
  double amplitude = 0.1;
  int period = 8;
  std::vector<int> canvas;
  int band = 1;
  std::vector<double> fg;
  std::vector<double> bg;
  std::string out_dir = ".";
  std::string prefix;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SceneSpec spec;
  if (a.kind == "ramp") spec.kind = RampScene{a.ramp_width};
  else if (a.kind == "hair") spec.kind = HairScene{a.length, a.thickness};
  else if (a.kind == "texture") spec.kind = TextureScene{a.amplitude, a.period};
  else throw ParameterError("unknown scene kind '" + a.kind + "'");
  if (!a.canvas.empty()) {
    spec.height = a.canvas[0];
    spec.width = a.canvas[1];
  }
  spec.band = a.band;
  spec.fg_color = a.fg;
  spec.bg_color = a.bg;
  const Scene scene = make_scene(spec);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const std::string stem = a.prefix.empty() ? a.kind : a.prefix;
  write_image(dir / (stem + "_image.png"), scene.image);
  write_alpha(dir / (stem + "_alpha.png"), scene.alpha);
  write_trimap(dir / (stem + "_trimap.png"), scene.trimap);
  out << "wrote " << (dir / (stem + "_{image,alpha,trimap}.png")).string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  std::string loss = "all";
  std::uint64_t seed = 1;
  int size = 8;
  int instances = 1;
  int window = 5;
  double step = 1e-5;
};

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  static const std::vector<std::pair<std::string, LossKind>> kinds{
      {"known", LossKind::Known}, {"affinity", LossKind::Affinity}, {"dc", LossKind::DC}, {"ddc", LossKind::DDC}};
  if (a.size < 1 || a.instances < 1) throw ParameterError("size and instances must be positive");
  bool matched = false;
  bool pass = true;
  for (const auto& [name, kind] : kinds) {
    if (a.loss != "all" && a.loss != name) continue;
    matched = true;
    std::mt19937_64 rng(a.seed);
    GradientCheck worst;
    for (int n = 0; n < a.instances; ++n) {
      const ImagePlane image = random_image(rng, a.size, a.size, 3);
      const Trimap trimap = random_trimap(rng, a.size, a.size);
      // Interior alpha keeps the known loss off its kinks at 0 and 1.
      const Field alpha = random_field(rng, a.size, a.size, 0.05, 0.95);
      const NeighborField field = build_neighbor_field(image, a.window);
      const std::vector<double> weights = affinity_weights(field);
      LossInputs inputs;
      inputs.trimap = &trimap;
      inputs.field = &field;
      inputs.weights = weights;
      const GradientCheck r = check_gradient(kind, alpha, inputs, a.step);
      worst.max_relative_error = std::max(worst.max_relative_error, r.max_relative_error);
      worst.checked += r.checked;
      worst.skipped += r.skipped;
    }
    const bool ok = worst.max_relative_error < kGradcheckTolerance;
    pass = pass && ok;
    out << name << ": max relative error " << fmt("%.3e", worst.max_relative_error) << ", checked " << worst.checked
        << ", skipped " << worst.skipped << (ok ? "" : "  FAIL") << '\n';
  }
  if (!matched) throw ParameterError("unknown loss '" + a.loss + "'");
  return pass ? kOk : kNumericalFailure;
}

}  // namespace

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

std::string trace_json(const SolveResult& result, const SolveOptions& options) {
  const SolverConfig& c = options.solver;
  json doc;
  doc["policy"] = policy_name(options.policy);
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["unanchored"] = result.unanchored;
  doc["config"] = {{"window", c.window},
                   {"lambda", c.lambda},
                   {"step_size", c.step_size},
                   {"momentum", c.momentum},
                   {"schedule", c.schedule == StepSchedule::Cosine ? "cosine" : "constant"},
                   {"max_iters", c.max_iters},
                   {"tol", c.convergence_tol},
                   {"padding", c.padding == Padding::Valid ? "valid" : "zero"},
                   {"normalization", c.normalization == Normalization::Reference ? "reference" : "per-pixel"},
                   {"seed", c.seed}};
  json points = json::array();
  for (const TracePoint& p : result.trace) {
    points.push_back({{"iteration", p.iteration},
                      {"total", p.total},
                      {"known", p.known},
                      {"regularizer", p.regularizer},
                      {"max_gradient", p.max_gradient}});
  }
  doc["trace"] = std::move(points);
  return doc.dump(2) + "\n";
}

void solve_file(const fs::path& image_path, const fs::path& trimap_path, const fs::path& output,
                const fs::path& trace, const SolveOptions& options, std::ostream& out) {
  const ImagePlane image = read_image(image_path);
  const Trimap trimap = read_trimap(trimap_path);
  const SolveResult result = solve(image, trimap, options.solver, options.policy);
  write_alpha(output, result.alpha, options.deep);
  write_text_atomic(trace, trace_json(result, options));
  out << output.string() << ": " << result.iterations << " iterations, "
      << (result.converged ? "converged" : "iteration budget reached") << ", loss "
      << fmt("%.6g", result.trace.empty() ? 0.0 : result.trace.back().total)
      << (result.unanchored ? ", unanchored" : "") << '\n';
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Per-image alpha matting from coarse trimaps", "matte"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve alpha for an image and trimap");
  solve_cmd->add_option("image", sa.image, "Input image PNG");
  solve_cmd->add_option("trimap", sa.trimap, "Trimap PNG (bytes 0/128/255)");
  solve_cmd->add_option("-o,--output", sa.output, "Alpha PNG, or output directory with --dir")->required();
  solve_cmd->add_option("--trace", sa.trace, "Trace JSON path (default: output with .json)");
  solve_cmd->add_option("--config", sa.config, "key=value settings file; flags take precedence");
  solve_cmd->add_option("--dir", sa.dir, "Batch root holding image/ and trimap/ subdirectories");
  const std::map<std::string, std::string> option_help{
      {"window", "Neighbor window K (odd, >= 3)"},
      {"lambda", "Regularizer weight"},
      {"step-size", "Initial step size"},
      {"momentum", "Momentum coefficient in [0, 1)"},
      {"schedule", "Step schedule: constant | cosine"},
      {"max-iters", "Iteration budget"},
      {"tol", "Relative loss change that counts as converged"},
      {"trace-every", "Record the loss every N iterations"},
      {"padding", "Window border handling: valid | zero"},
      {"normalization", "Pairwise averaging: reference | per-pixel"},
      {"policy", "Loss: known | affinity | dc | ddc"},
      {"penalty", "Known-pixel penalty: l1 | bce"},
      {"labels", "Known targets: trimap | mask"},
      {"bce-epsilon", "Clamp for the BCE penalty"},
      {"seed", "Random seed"},
  };
  for (const std::string& key : solve_option_keys()) {
    sa.given[key] = key == "deep" ? solve_cmd->add_flag("--deep", "Write 16-bit alpha")
                                  : solve_cmd->add_option("--" + key, sa.raw[key], option_help.at(key));
  }

  TrimapArgs ta;
  auto* trimap_cmd = app.add_subcommand("trimap", "Erode an alpha matte into a trimap");
  trimap_cmd->add_option("alpha", ta.alpha, "Alpha PNG")->required();
  trimap_cmd->add_option("-o,--output", ta.output, "Trimap PNG")->required();
  auto* kernel = trimap_cmd->add_option("--kernel", ta.kernel, "Odd erosion kernel size");
  trimap_cmd->add_option("--kernel-range", ta.range, "Draw the kernel from the odd sizes in [A, B]")
      ->expected(2)
      ->excludes(kernel);
  trimap_cmd->add_option("--seed", ta.seed, "Seed for --kernel-range");
  trimap_cmd->add_option("--delta", ta.delta, "Binarization threshold");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Print matting metrics as JSON");
  eval_cmd->add_option("pred", ea.pred)->required();
  eval_cmd->add_option("gt", ea.gt)->required();
  eval_cmd->add_option("trimap", ea.trimap)->required();

  auto* analyze = app.add_subcommand("analyze", "Theory checks and synthetic scenes");
  analyze->require_subcommand(1);

  BrakingArgs ba;
  auto* braking = analyze->add_subcommand("braking", "Residuals of the braking recursion");
  braking->add_option("--form", ba.form, "constant, linear, quadratic or cubic");
  braking->add_option("-K,--K,--window", ba.window);
  braking->add_option("--length", ba.length, "Sequence length");

  BoundsArgs bo;
  auto* bounds = analyze->add_subcommand("bounds", "Check the DDC pairwise bound on random instances");
  bounds->add_option("--samples", bo.samples, "Random instances per K");
  bounds->add_option("--size", bo.size, "Image side length");
  bounds->add_option("-K,--K,--window", bo.windows);
  bounds->add_option("--seed", bo.seed, "Random seed");

  SymmetryArgs sy;
  auto* symmetry = analyze->add_subcommand("symmetry", "Affinity weight symmetry on a linear ramp");
  symmetry->add_option("-K,--K,--window", sy.window);
  symmetry->add_option("--slope", sy.slope, "Ramp slope per pixel");
  symmetry->add_option("--offset", sy.offset, "Ramp value at column 0");

  SynthArgs sn;
  auto* synth = analyze->add_subcommand("synth", "Write an image/alpha/trimap scene triplet");
  synth->add_option("--kind", sn.kind, "ramp, hair or texture");
  synth->add_option("--width", sn.ramp_width, "Ramp width");
  synth->add_option("--length", sn.length, "Hair length");
  synth->add_option("--thickness", sn.thickness, "Hair thickness");
  synth->add_option("--amplitude", sn.amplitude, "Texture amplitude");
  synth->add_option("--period", sn.period, "Texture period");
  synth->add_option("--canvas", sn.canvas, "Canvas height and width")->expected(2);
  synth->add_option("--band", sn.band, "Unknown band radius");
  synth->add_option("--fg", sn.fg, "Foreground color");
  synth->add_option("--bg", sn.bg, "Background color");
  synth->add_option("--out-dir", sn.out_dir);
  synth->add_option("--prefix", sn.prefix, "File name stem (default: the kind)");

  GradcheckArgs ga;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytical gradients with central differences");
  gradcheck->add_option("--loss", ga.loss, "known, affinity, dc, ddc or all");
  gradcheck->add_option("--seed", ga.seed, "Random seed");
  gradcheck->add_option("--size", ga.size, "Image side length");
  gradcheck->add_option("--instances", ga.instances, "Random instances per loss");
  gradcheck->add_option("-K,--K,--window", ga.window);
  gradcheck->add_option("--step", ga.step, "Finite-difference step");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa, out, err);
    if (*trimap_cmd) return cmd_trimap(ta, out);
    if (*eval_cmd) return cmd_eval(ea, out);
    if (*braking) return cmd_braking(ba, out);
    if (*bounds) return cmd_bounds(bo, out);
    if (*symmetry) return cmd_symmetry(sy, out);
    if (*synth) return cmd_synth(sn, out);
    if (*gradcheck) return cmd_gradcheck(ga, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace matte::cli
