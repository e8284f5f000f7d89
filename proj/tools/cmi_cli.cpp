// Command-line front end: `cmi test|size|power|limit`.
//
// Exit status is 0 whenever a run completes, whatever the decision; the
// decision lives in the report. Validation and I/O failures exit with 1.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cmi/error.hpp"
#include "cmi/io.hpp"
#include "cmi/simulation.hpp"

namespace {

struct TestFlags {
  double alpha = 0.05;
  double sigma_min = 0.0;  // 0 = use the schedule
  double kappa = 1.0;
  double delta = 0.25;
  std::string contact = "full";
  int c_exponent = 2;
};

struct OutputFlags {
  std::string out = "-";
  bool no_timestamp = false;
};

void add_test_flags(CLI::App* cmd, TestFlags& f) {
  cmd->add_option("--alpha", f.alpha, "Nominal level")->capture_default_str();
  cmd->add_option("--sigma-min", f.sigma_min, "Explicit truncation sigma_min (overrides --kappa/--delta)");
  cmd->add_option("--kappa", f.kappa, "Schedule constant K in K * sd(y) * n^-delta")->capture_default_str();
  cmd->add_option("--delta", f.delta, "Schedule exponent in (0, 1/2)")->capture_default_str();
  cmd->add_option("--contact", f.contact, "Contact set: full | estimate | lo,hi")->capture_default_str();
  cmd->add_option("--c-exponent", f.c_exponent, "Power of sigma_min dividing c_hat")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--out", f.out, "Report path ('-' for stdout)")->capture_default_str();
  cmd->add_flag("--no-timestamp", f.no_timestamp, "Omit generated_at from the report");
}

cmi::ContactSetSpec parse_contact(const std::string& text) {
  if (text == "full") return cmi::ContactSetSpec::full_support();
  if (text == "estimate") return cmi::ContactSetSpec::estimated();
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw cmi::Error(cmi::ErrorCode::InvalidArgument, "--contact expects full, estimate or lo,hi");
  }
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, comma);
    const std::string hi_text = text.substr(comma + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument(lo_text);
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument(hi_text);
    if (!(lo <= hi)) throw cmi::Error(cmi::ErrorCode::InvalidArgument, "--contact requires lo <= hi");
    return cmi::ContactSetSpec::bounds(lo, hi);
  } catch (const std::logic_error&) {
    throw cmi::Error(cmi::ErrorCode::InvalidArgument, "--contact bounds are not numbers: " + text);
  }
}

cmi::TestConfig make_config(const TestFlags& f) {
  cmi::TestConfig c;
  c.alpha = f.alpha;
  c.truncation = f.sigma_min > 0.0 ? cmi::TruncationRule::explicit_value(f.sigma_min)
                                   : cmi::TruncationRule::schedule(f.kappa, f.delta);
  c.contact = parse_contact(f.contact);
  c.c_exponent = f.c_exponent;
  return c;
}

cmi::NoiseSpec parse_noise(const std::string& name, double scale) {
  cmi::NoiseSpec noise;
  noise.scale = scale;
  if (name == "rademacher") {
    noise.kind = cmi::NoiseSpec::Kind::Rademacher;
  } else if (name == "uniform") {
    noise.kind = cmi::NoiseSpec::Kind::Uniform;
  } else if (name == "truncnormal") {
    noise.kind = cmi::NoiseSpec::Kind::TruncatedNormal;
  } else {
    throw cmi::Error(cmi::ErrorCode::InvalidArgument, "unknown noise law " + name);
  }
  return noise;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 2) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw cmi::Error(cmi::ErrorCode::InvalidArgument, "--n expects comma-separated integers >= 2, got " + text);
    }
  }
  if (out.empty()) throw cmi::Error(cmi::ErrorCode::InvalidArgument, "--n is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-weighted KS test of E(Y | X) >= 0 with extreme-value critical values"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cmi::kToolVersion);

  TestFlags test_flags;
  OutputFlags out_flags;

  std::string input;
  auto* test_cmd = app.add_subcommand("test", "Run the test on a CSV file (columns x, y[, y2, ...])");
  test_cmd->add_option("input", input, "CSV input path")->required();
  add_test_flags(test_cmd, test_flags);
  add_output_flags(test_cmd, out_flags);

  std::string n_text = "500";
  std::size_t reps = 2000;
  std::uint64_t seed = 1;
  std::string dgp = "binding";
  std::string noise = "rademacher";
  double noise_scale = 1.0;
  auto* size_cmd = app.add_subcommand("size", "Monte Carlo size under a null DGP with X ~ U[0,1]");
  size_cmd->add_option("--n", n_text, "Sample size")->capture_default_str();
  size_cmd->add_option("--reps", reps, "Replications")->capture_default_str();
  size_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
  size_cmd->add_option("--dgp", dgp, "binding (E(Y|X)=0) or slack (E(Y|X)=1)")
      ->check(CLI::IsMember({"binding", "slack"}))
      ->capture_default_str();
  size_cmd->add_option("--noise", noise, "rademacher | uniform | truncnormal")->capture_default_str();
  size_cmd->add_option("--noise-scale", noise_scale, "Noise scale")->capture_default_str();
  add_test_flags(size_cmd, test_flags);
  add_output_flags(size_cmd, out_flags);

  std::string power_n_text = "200,2000";
  std::size_t power_reps = 500;
  double amplitude = 0.5;
  double bump_lo = 0.4;
  double bump_hi = 0.6;
  auto* power_cmd = app.add_subcommand("power", "Monte Carlo power against E(Y|X) = -amplitude on [lo, hi]");
  power_cmd->add_option("--n", power_n_text, "Comma-separated sample sizes")->capture_default_str();
  power_cmd->add_option("--reps", power_reps, "Replications per cell")->capture_default_str();
  power_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
  power_cmd->add_option("--amplitude", amplitude, "Violation depth")->capture_default_str();
  power_cmd->add_option("--bump-lo", bump_lo, "Violation region start")->capture_default_str();
  power_cmd->add_option("--bump-hi", bump_hi, "Violation region end")->capture_default_str();
  power_cmd->add_option("--noise", noise, "rademacher | uniform | truncnormal")->capture_default_str();
  power_cmd->add_option("--noise-scale", noise_scale, "Noise scale")->capture_default_str();
  add_test_flags(power_cmd, test_flags);
  add_output_flags(power_cmd, out_flags);

  cmi::LimitSimConfig limit;
  auto* limit_cmd = app.add_subcommand("limit", "Simulate the Brownian increment extreme and compare to Gumbel");
  limit_cmd->add_option("--horizon", limit.horizon, "Horizon T")->capture_default_str();
  limit_cmd->add_option("--step", limit.step, "Grid step in s and t")->capture_default_str();
  limit_cmd->add_option("--reps", limit.reps, "Replications")->capture_default_str();
  limit_cmd->add_option("--seed", limit.seed, "Master seed")->capture_default_str();
  add_output_flags(limit_cmd, out_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const bool stamp = !out_flags.no_timestamp;
    if (*test_cmd) {
      const auto config = make_config(test_flags);
      const auto data = cmi::ingest_csv(input);
      const auto report = cmi::run_test_bonferroni(data.samples, config);
      auto body = cmi::to_json(report);
      body["input"] = input;
      body["y_columns"] = data.y_names;
      cmi::emit_report(cmi::make_document("test", std::move(body), stamp), out_flags.out);
    } else if (*size_cmd || *power_cmd) {
      const auto config = make_config(test_flags);
      const auto sizes = parse_sizes(*size_cmd ? n_text : power_n_text);

      cmi::DgpSpec null_spec;
      null_spec.label = "null";
      null_spec.noise = parse_noise(noise, noise_scale);
      null_spec.seed = seed;
      null_spec.n = sizes.front();

      nlohmann::json body;
      body["config"] = cmi::to_json(config);
      body["seed"] = seed;
      body["noise"] = {{"law", noise}, {"scale", noise_scale}};
      if (*size_cmd) {
        if (dgp == "slack") null_spec.mean = [](double) { return 1.0; };
        null_spec.label = dgp;
        body["dgp"] = dgp;
        body["summary"] = cmi::to_json(cmi::mc_size(null_spec, config, reps));
        cmi::emit_report(cmi::make_document("size", std::move(body), stamp), out_flags.out);
      } else {
        cmi::DgpSpec alt = null_spec;
        alt.label = "alternative";
        alt.mean = [=](double x) { return (x >= bump_lo && x <= bump_hi) ? -amplitude : 0.0; };
        body["alternative"] = {{"amplitude", amplitude}, {"lo", bump_lo}, {"hi", bump_hi}};
        body["cells"] = nlohmann::json::array();
        for (const auto& cell : cmi::mc_power(null_spec, {alt}, sizes, config, power_reps)) {
          body["cells"].push_back(cmi::to_json(cell));
        }
        cmi::emit_report(cmi::make_document("power", std::move(body), stamp), out_flags.out);
      }
    } else if (*limit_cmd) {
      const auto summary = cmi::simulate_limit_infimum(limit);
      cmi::emit_report(cmi::make_document("limit", cmi::to_json(summary), stamp), out_flags.out);
    }
  } catch (const cmi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
