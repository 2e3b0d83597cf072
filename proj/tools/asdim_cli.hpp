#pragma once

// Batch front end: build, dim, profile, verify, oracle-check, schedule.
//
// Exit status: 0 success, 1 oracle mismatch, 2 parse or validation error,
// 3 budget exhausted under --strict.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asdim/asdim.hpp"

namespace asdim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitUnknown = 3;

/// Spec argument: inline text, or "@path" to read the expression from a file.
inline SpaceSpec load_spec(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw MetricError("cannot open spec file '" + arg.substr(1) + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
  }
  return parse_spec(arg);
}

inline std::vector<Distance> parse_lambda_list(const std::string& text) {
  std::vector<Distance> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size() || item[0] == '-')
      throw MetricError("--lambda-list: '" + item + "' is not a nonnegative integer");
    out.push_back(v);
  }
  if (out.empty()) throw MetricError("--lambda-list: empty");
  return out;
}

/// Step plot of dim against lambda on a logarithmic lambda axis.
inline void write_profile_svg(std::ostream& out, const Profile& p, const std::string& title) {
  const double width = 640, height = 360, left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  double lo = 1, hi = 2;
  std::size_t max_dim = 1;
  if (!p.samples.empty()) {
    lo = static_cast<double>(p.samples.front().lambda);
    hi = static_cast<double>(p.samples.back().lambda);
    if (hi <= lo) hi = lo * 2;
  }
  for (const auto& s : p.samples)
    if (s.dim) max_dim = std::max(max_dim, *s.dim);
  auto x_of = [&](double lambda) {
    return left + plot_w * (std::log(lambda) - std::log(lo)) / (std::log(hi) - std::log(lo));
  };
  auto y_of = [&](double dim) { return top + plot_h * (1.0 - dim / static_cast<double>(max_dim + 1)); };

  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
      << " (c = " << p.c << ")</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  for (std::size_t d = 0; d <= max_dim; ++d)
    out << "<text x=\"" << left - 10 << "\" y=\"" << y_of(static_cast<double>(d)) + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << d << "</text>\n";
  for (const auto& s : p.samples)
    out << "<text x=\"" << x_of(static_cast<double>(s.lambda)) << "\" y=\"" << top + plot_h + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << s.lambda << "</text>\n";
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">lambda (log scale)</text>\n";

  std::string path;
  bool open = false;
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    const auto& s = p.samples[i];
    if (!s.dim) {
      open = false;
      continue;
    }
    const double x = x_of(static_cast<double>(s.lambda));
    const double y = y_of(static_cast<double>(*s.dim));
    std::ostringstream seg;
    seg << std::fixed << std::setprecision(2);
    if (!open) seg << " M " << x << ' ' << y;
    else seg << " V " << y;
    const double next = i + 1 < p.samples.size() ? x_of(static_cast<double>(p.samples[i + 1].lambda)) : x;
    seg << " H " << next;
    path += seg.str();
    open = true;
  }
  if (!path.empty()) out << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
  for (const auto& s : p.samples) {
    if (!s.dim) continue;
    const bool bound = s.status != ProfileStatus::exact;
    out << "<circle cx=\"" << x_of(static_cast<double>(s.lambda)) << "\" cy=\"" << y_of(static_cast<double>(*s.dim))
        << "\" r=\"4\" fill=\"" << (bound ? "white" : "steelblue") << "\" stroke=\"steelblue\"/>\n";
  }
  out << "</svg>\n";
}

/// Scales and witness subsets implied by group(p,N) / wedgegroup(p,N).
struct ScheduleScan {
  std::vector<Distance> lambdas;
  std::vector<std::vector<PointIndex>> witnesses;
};

inline ScheduleScan schedule_scan(const WeightSchedule& s) {
  ScheduleScan scan;
  for (Distance d : dip_scales(s))
    if (d > 0) scan.lambdas.push_back(d);
  for (Distance a : rise_scales(s)) scan.lambdas.push_back(a);
  std::sort(scan.lambdas.begin(), scan.lambdas.end());
  scan.lambdas.erase(std::unique(scan.lambdas.begin(), scan.lambdas.end()), scan.lambdas.end());
  for (std::size_t n = s.levels(); n >= 1; --n) {
    if (s.mode == ScheduleMode::group) scan.witnesses.push_back(group_coordinate_circle(s.p, s.levels(), n));
    else scan.witnesses.push_back(wedge_level_points(s, n));
  }
  return scan;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact dimension-at-scale computations on finite metric spaces", "asdim"};
  app.require_subcommand(1);

  std::string spec_text, cert_path, csv_path, svg_path, mode_text = "group";
  Distance lambda = 0, control = 0, c = 2;
  std::string lambda_list;
  bool from_schedule = false, strict = false;
  std::uint64_t budget = 0, seed = 0, p = 3;
  std::size_t cases = 100, max_size = 7, levels = 3, full_limit = 64;
  std::int64_t max_weight = 9;
  unsigned threads = 1;

  auto* build_cmd = app.add_subcommand("build", "Print size, diameter and minimum distance");
  build_cmd->add_option("spec", spec_text, "Space expression or @file")->required();

  auto* dim_cmd = app.add_subcommand("dim", "Compute di_(lambda,D) with a certificate");
  dim_cmd->add_option("spec", spec_text, "Space expression or @file")->required();
  dim_cmd->add_option("--lambda", lambda, "Scale")->required();
  dim_cmd->add_option("--control", control, "Diameter bound D")->required();
  dim_cmd->add_option("--cert", cert_path, "Certificate output path")->default_val("certificate.txt");
  dim_cmd->add_option("--budget", budget, "Search node budget (overrides ASDIM_NODE_BUDGET)");
  dim_cmd->add_flag("--strict", strict, "Exit 3 when the budget runs out");

  auto* profile_cmd = app.add_subcommand("profile", "Sample f_c(lambda) = di_(lambda, c*lambda)");
  profile_cmd->add_option("spec", spec_text, "Space expression or @file")->required();
  profile_cmd->add_option("--c", c, "Linear control coefficient")->default_val(2);
  auto* list_opt = profile_cmd->add_option("--lambda-list", lambda_list, "Comma-separated scales");
  auto* sched_opt = profile_cmd->add_flag("--from-schedule", from_schedule,
                                          "Use the dip and rise scales of group(p,N) / wedgegroup(p,N)");
  list_opt->excludes(sched_opt);
  profile_cmd->add_option("--out", csv_path, "CSV output path (default stdout)");
  profile_cmd->add_option("--svg", svg_path, "Write a step plot");
  profile_cmd->add_option("--budget", budget, "Search node budget per sample");
  profile_cmd->add_option("--full-search-limit", full_limit, "Largest space given a full search")->default_val(64);
  profile_cmd->add_option("--threads", threads, "Parallel samples")->default_val(1);
  profile_cmd->add_flag("--strict", strict, "Exit 3 if any sample is unknown");

  auto* verify_cmd = app.add_subcommand("verify", "Validate a certificate against a space");
  verify_cmd->add_option("certificate", cert_path, "Certificate file")->required();
  verify_cmd->add_option("spec", spec_text, "Space expression or @file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare the solver with brute force on random spaces");
  oracle_cmd->add_option("--seed", seed, "Random seed")->default_val(0);
  oracle_cmd->add_option("--cases", cases, "Number of random spaces")->default_val(100);
  oracle_cmd->add_option("--max-size", max_size, "Largest space (<= 10)")->default_val(7)->check(CLI::Range(1, 10));
  oracle_cmd->add_option("--max-weight", max_weight, "Largest raw edge weight")->default_val(9)->check(CLI::Range(1, 1000));

  auto* schedule_cmd = app.add_subcommand("schedule", "Print the weight schedule as CSV");
  schedule_cmd->add_option("--p", p, "Prime")->default_val(3);
  schedule_cmd->add_option("--N", levels, "Number of levels")->default_val(3);
  schedule_cmd->add_option("--mode", mode_text, "group | wedge | interval-wedge")->default_val("group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  SolverOptions solver = solver_options_from_env();
  if (budget > 0) solver.node_budget = budget;

  try {
    if (build_cmd->parsed()) {
      const auto space = build_space(load_spec(spec_text));
      out << "label " << space.label() << "\n";
      out << "size " << space.size() << "\n";
      out << "diameter " << diameter(space) << "\n";
      if (space.size() >= 2) out << "min_distance " << min_positive_distance(space) << "\n";
      else out << "min_distance -\n";
      return kExitOk;
    }

    if (dim_cmd->parsed()) {
      const auto space = build_space(load_spec(spec_text));
      const DimResult r = dim_at_scale(space, {lambda, control}, solver);
      {
        std::ofstream cert(cert_path);
        if (!cert) throw MetricError("cannot write certificate to '" + cert_path + "'");
        write_certificate(cert, space, r.certificate);
      }
      if (r.exact()) {
        out << *r.value << "\n";
        err << "certificate written to " << cert_path << "\n";
        return kExitOk;
      }
      out << "unknown " << r.lower_bound << ".." << r.upper_bound << "\n";
      err << "node budget exhausted after " << r.nodes << " nodes; certificate for the upper bound written to "
          << cert_path << "\n";
      return strict ? kExitUnknown : kExitOk;
    }

    if (profile_cmd->parsed()) {
      const SpaceSpec spec = load_spec(spec_text);
      const auto space = build_space(spec);
      ProfileOptions options;
      options.solver = solver;
      options.full_search_limit = full_limit;
      options.threads = std::max(1u, threads);
      std::vector<Distance> lambdas;
      if (from_schedule) {
        if (spec.kind != SpecKind::group && spec.kind != SpecKind::wedgegroup)
          throw MetricError("--from-schedule needs a group(p,N) or wedgegroup(p,N) space");
        const auto mode = spec.kind == SpecKind::group ? ScheduleMode::group : ScheduleMode::wedge;
        const auto scan = schedule_scan(weight_schedule(spec.numbers[0], spec.numbers[1], mode));
        lambdas = scan.lambdas;
        options.witness_subsets = scan.witnesses;
      } else if (!lambda_list.empty()) {
        lambdas = parse_lambda_list(lambda_list);
        if (spec.kind == SpecKind::group || spec.kind == SpecKind::wedgegroup) {
          const auto mode = spec.kind == SpecKind::group ? ScheduleMode::group : ScheduleMode::wedge;
          options.witness_subsets = schedule_scan(weight_schedule(spec.numbers[0], spec.numbers[1], mode)).witnesses;
        }
      } else {
        throw MetricError("profile needs --lambda-list or --from-schedule");
      }
      const Profile prof = profile(space, c, lambdas, options);
      if (csv_path.empty()) {
        write_profile_csv(out, prof);
      } else {
        std::ofstream csv(csv_path);
        if (!csv) throw MetricError("cannot write '" + csv_path + "'");
        write_profile_csv(csv, prof);
      }
      if (!svg_path.empty()) {
        std::ofstream svg(svg_path);
        if (!svg) throw MetricError("cannot write '" + svg_path + "'");
        write_profile_svg(svg, prof, space.label());
      }
      const bool any_unknown = std::any_of(prof.samples.begin(), prof.samples.end(),
                                           [](const auto& s) { return s.status == ProfileStatus::unknown; });
      return strict && any_unknown ? kExitUnknown : kExitOk;
    }

    if (verify_cmd->parsed()) {
      std::ifstream in(cert_path);
      if (!in) throw MetricError("cannot open certificate '" + cert_path + "'");
      const Certificate cert = read_certificate(in);
      const auto space = build_space(load_spec(spec_text));
      if (cert.size != space.size()) {
        err << "size mismatch: certificate has " << cert.size << " points, space has " << space.size() << "\n";
        return kExitInvalid;
      }
      if (cert.label != space.label()) err << "warning: certificate label '" << cert.label << "' differs from '" << space.label() << "'\n";
      const auto report = validate_cover(space, cert.cover);
      if (!report.ok()) {
        for (const auto& v : report.violations) err << describe(v) << "\n";
        out << "invalid (" << report.violations.size() << " violations)\n";
        return kExitInvalid;
      }
      out << "ok: " << cert.cover.families.size() << " families valid at lambda " << cert.cover.scale.lambda
          << ", control " << cert.cover.scale.control << "\n";
      return kExitOk;
    }

    if (oracle_cmd->parsed()) {
      Rng rng(seed);
      const std::vector<Distance> lambdas{1, 2, 4, 6};
      const std::vector<Distance> controls{0, 3, 6, 10};
      std::size_t comparisons = 0, mismatches = 0;
      for (std::size_t k = 0; k < cases; ++k) {
        const std::size_t size = 1 + uniform_below(rng, max_size);
        const auto space = random_metric_space(rng, size, max_weight);
        for (Distance l : lambdas)
          for (Distance d : controls) {
            const DimResult fast = dim_at_scale(space, {l, d}, solver);
            const std::size_t slow = dim_at_scale_bruteforce(space, {l, d});
            ++comparisons;
            if (!fast.exact() || *fast.value != slow) {
              ++mismatches;
              out << "mismatch case " << k << " size " << size << " lambda " << l << " control " << d
                  << ": solver " << (fast.exact() ? std::to_string(*fast.value) : std::string("unknown"))
                  << " brute-force " << slow << "\n";
            }
          }
      }
      out << "seed " << seed << " cases " << cases << " comparisons " << comparisons << " mismatches "
          << mismatches << "\n";
      return mismatches == 0 ? kExitOk : kExitMismatch;
    }

    if (schedule_cmd->parsed()) {
      const auto mode = parse_schedule_mode(mode_text);
      if (!mode) throw MetricError("--mode must be group, wedge or interval-wedge");
      const auto s = weight_schedule(p, levels, *mode);
      for (std::size_t n : s.short_levels)
        err << "warning: p^" << n << " < 2(" << n << "+1); level " << n << " may admit dimension 0\n";
      write_schedule_csv(out, s);
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace asdim::cli
