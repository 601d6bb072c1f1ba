#include "matte/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "matte/png_io.hpp"

namespace matte::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty())
    throw ParameterError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ParameterError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

[[noreturn]] void bad_choice(std::string_view key, std::string_view value) {
  throw ParameterError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

}  // namespace

const std::vector<std::string>& solve_option_keys() {
  static const std::vector<std::string> keys{
      "window",    "lambda",  "step-size", "momentum", "schedule",    "max-iters",   "tol",  "trace-every",
      "padding",   "normalization", "policy", "penalty", "labels", "bce-epsilon", "seed", "deep"};
  return keys;
}

void set_option(SolveOptions& o, std::string_view key, std::string_view value) {
  SolverConfig& s = o.solver;
  if (key == "window") {
    s.window = parse_number<int>(key, value);
  } else if (key == "lambda") {
    s.lambda = parse_number<double>(key, value);
  } else if (key == "step-size") {
    s.step_size = parse_number<double>(key, value);
  } else if (key == "momentum") {
    s.momentum = parse_number<double>(key, value);
  } else if (key == "schedule") {
    if (value == "constant") s.schedule = StepSchedule::Constant;
    else if (value == "cosine") s.schedule = StepSchedule::Cosine;
    else bad_choice(key, value);
  } else if (key == "max-iters") {
    s.max_iters = parse_number<int>(key, value);
  } else if (key == "tol") {
    s.convergence_tol = parse_number<double>(key, value);
  } else if (key == "trace-every") {
    s.trace_every = parse_number<int>(key, value);
  } else if (key == "padding") {
    if (value == "valid") s.padding = Padding::Valid;
    else if (value == "zero") s.padding = Padding::ZeroPad;
    else bad_choice(key, value);
  } else if (key == "normalization") {
    if (value == "reference") s.normalization = Normalization::Reference;
    else if (value == "per-pixel") s.normalization = Normalization::PerPixel;
    else bad_choice(key, value);
  } else if (key == "policy") {
    o.policy = parse_policy(value);
  } else if (key == "penalty") {
    if (value == "l1") s.known.penalty = KnownPenalty::L1;
    else if (value == "bce") s.known.penalty = KnownPenalty::BCE;
    else bad_choice(key, value);
  } else if (key == "labels") {
    if (value == "trimap") s.known.labels = LabelMode::TrimapKnownOnly;
    else if (value == "mask") s.known.labels = LabelMode::MaskAllPixels;
    else bad_choice(key, value);
  } else if (key == "bce-epsilon") {
    s.known.bce_epsilon = parse_number<double>(key, value);
  } else if (key == "seed") {
    s.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "deep") {
    o.deep = parse_bool(key, value);
  } else {
    throw ParameterError("unknown config key '" + std::string(key) + "'");
  }
}

Settings parse_config(std::string_view text) {
  Settings out;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParameterError("config line " + std::to_string(number) + ": expected key=value");
    const std::string_view key = trim(body.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(number) + ": empty key");
    out.emplace_back(std::string(key), std::string(trim(body.substr(eq + 1))));
  }
  return out;
}

Settings read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

LossPolicy parse_policy(std::string_view name) {
  if (name == "known") return LossPolicy::Known;
  if (name == "affinity") return LossPolicy::KnownAffinity;
  if (name == "dc") return LossPolicy::KnownDC;
  if (name == "ddc") return LossPolicy::KnownDDC;
  throw ParameterError("unknown loss policy '" + std::string(name) + "'");
}

std::string policy_name(LossPolicy policy) {
  switch (policy) {
    case LossPolicy::Known: return "known";
    case LossPolicy::KnownAffinity: return "affinity";
    case LossPolicy::KnownDC: return "dc";
    case LossPolicy::KnownDDC: break;
  }
  return "ddc";
}

}  // namespace matte::cli
