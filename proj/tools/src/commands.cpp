#include "ipl/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "ipl/errors.hpp"

namespace ipl::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// LinkSet::to_string uses commas, which would split a CSV header cell
std::string links_label(LinkSet g) {
  std::string s = "{";
  bool first = true;
  for (auto link : g.links()) {
    if (!first) s += ';';
    s += std::to_string(link);
    first = false;
  }
  return s + "}";
}

class CsvWriter {
 public:
  explicit CsvWriter(std::string header) : text_(std::move(header)) {}

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i != 0) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  void numbers(double first, std::span<const double> rest) {
    text_ += format_number(first);
    for (double x : rest) {
      text_ += ',';
      text_ += format_number(x);
    }
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

json provenance(const CommandContext& ctx) {
  return {{"schema", kSchemaVersion},
          {"seed", ctx.config.seed},
          {"model_hash", model_hash(ctx.config)},
          {"command", ctx.command_line}};
}

// NaN/inf are not valid JSON numbers; keep them readable instead of emitting null
json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

fs::path prepare(const CommandContext& ctx, const std::string& name) {
  fs::create_directories(ctx.out_dir);
  return ctx.out_dir / name;
}

std::vector<std::string> trajectory_header(const TypeSpace& space) {
  std::vector<std::string> cols{"t"};
  for (auto& label : state_labels(space)) cols.push_back(label);
  return cols;
}

std::string trajectory_csv(const CommandContext& ctx, const Trajectory& traj,
                           const std::vector<std::string>& notes) {
  CsvWriter csv(header_lines(ctx, notes));
  csv.row(trajectory_header(traj.states.front().space()));
  for (std::size_t k = 0; k < traj.size(); ++k) csv.numbers(traj.times[k], traj.states[k].weights());
  return csv.text();
}

// the closed form is exact only when selection starts from a product state
std::vector<std::string> closed_form_notes(const ModelSpec& model, CommandResult& result) {
  std::vector<std::string> notes;
  if (model.has_selection() && !is_product_measure(model.initial)) {
    notes.push_back(
        "warning: selection with a non-product initial measure; the closed form is approximate "
        "here, compare against `integrate`");
    result.warnings.push_back(notes.back());
  }
  return notes;
}

double max_abs(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at " + path.string());
  }
}

std::string header_lines(const CommandContext& ctx, const std::vector<std::string>& notes) {
  std::ostringstream os;
  os << "# ipl schema=" << kSchemaVersion << '\n'
     << "# seed=" << ctx.config.seed << '\n'
     << "# model_hash=" << model_hash(ctx.config) << '\n'
     << "# command=" << ctx.command_line << '\n';
  for (const auto& note : notes) os << "# " << note << '\n';
  return os.str();
}

std::vector<std::string> state_labels(const TypeSpace& space) {
  std::vector<std::string> labels;
  labels.reserve(space.total_size());
  for (std::size_t i = 0; i < space.total_size(); ++i) labels.push_back(coords_label(space.coords_of(i)));
  return labels;
}

bool is_product_measure(const Measure& w, double tol) {
  const auto& space = w.space();
  if (space.n_sites() <= 1) return true;
  const double mass = w.mass();
  std::vector<SignedMeasure> factors;
  for (std::size_t i = 0; i < space.n_sites(); ++i) {
    auto m = marginal(w, SiteBlock{i, i + 1});
    factors.push_back((1.0 / mass) * m);
  }
  const auto prod = mass * product(space, partition_of(space, space.all_links()), factors);
  return max_abs_difference(prod, w) <= tol * std::max(1.0, mass);
}

CommandResult run_solve(const CommandContext& ctx) {
  CommandResult result;
  const auto model = ctx.config.model();
  const auto times = ctx.config.times.points();
  const auto notes = closed_form_notes(model, result);
  const auto traj = solve_combined(model, times, SolveOptions{.with_coefficients = true});

  const auto traj_path = prepare(ctx, "trajectory.csv");
  write_atomic(traj_path, trajectory_csv(ctx, traj, notes));
  result.files.push_back(traj_path);

  const auto all = model.space.all_links();
  CsvWriter coeffs(header_lines(ctx));
  std::vector<std::string> cols{"t"};
  for (LinkSet g : subsets_of(all)) cols.push_back("a" + links_label(g));
  for (LinkSet g : subsets_of(all)) cols.push_back("b" + links_label(g));
  coeffs.row(cols);
  for (const auto& table : traj.coefficients) {
    std::vector<double> row;
    for (LinkSet g : subsets_of(all)) row.push_back(table.a_of(g));
    for (LinkSet g : subsets_of(all)) row.push_back(table.b_of(g));
    coeffs.numbers(table.time, row);
  }
  const auto coeff_path = prepare(ctx, "coefficients.csv");
  write_atomic(coeff_path, coeffs.text());
  result.files.push_back(coeff_path);

  if (traj.mean_fitness) {
    CsvWriter mf(header_lines(ctx, notes));
    mf.row({"t", "mean_fitness"});
    for (std::size_t k = 0; k < traj.mean_fitness->times.size(); ++k) {
      const double v = traj.mean_fitness->values[k];
      mf.numbers(traj.mean_fitness->times[k], std::span<const double>(&v, 1));
    }
    const auto mf_path = prepare(ctx, "mean_fitness.csv");
    write_atomic(mf_path, mf.text());
    result.files.push_back(mf_path);
  }
  result.summary = "solved " + std::to_string(traj.size()) + " time points";
  return result;
}

CommandResult run_integrate(const CommandContext& ctx) {
  CommandResult result;
  const auto model = ctx.config.model();
  const auto times = ctx.config.times.points();
  const auto traj = integrate_rk4(model, times.back(), ctx.config.dt, times);
  const auto path = prepare(ctx, "trajectory_rk4.csv");
  write_atomic(path, trajectory_csv(ctx, traj, {"dt=" + format_number(ctx.config.dt)}));
  result.files.push_back(path);
  result.summary = "integrated to t = " + format_number(times.back()) + " with dt = " +
                   format_number(ctx.config.dt);
  return result;
}

CommandResult run_compare(const CommandContext& ctx) {
  CommandResult result;
  const auto model = ctx.config.model();
  const auto times = ctx.config.times.points();
  closed_form_notes(model, result);

  json doc = provenance(ctx);
  doc["dt"] = ctx.config.dt;
  doc["threshold"] = ctx.config.threshold;
  doc["times"] = times;

  const auto closed = solve_combined(model, times);
  bool pass = false;
  try {
    const auto rk4 = integrate_rk4(model, times.back(), ctx.config.dt, times);
    std::vector<double> deviations;
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      deviations.push_back(max_abs(closed.states[k].weights(), rk4.states[k].weights()));
      worst = std::max(worst, deviations.back());
    }
    json devs = json::array();
    for (double d : deviations) devs.push_back(json_number(d));
    doc["deviations"] = devs;
    doc["max_deviation"] = json_number(worst);
    pass = worst <= ctx.config.threshold;
    result.summary = "max deviation " + format_number(worst) + (pass ? " <= " : " > ") + "threshold " +
                     format_number(ctx.config.threshold);
  } catch (const IntegrationError& e) {
    doc["error"] = e.what();
    doc["failed_at"] = e.time();
    result.summary = std::string("reference integration failed: ") + e.what();
  }
  doc["pass"] = pass;
  if (!result.warnings.empty()) doc["warnings"] = result.warnings;

  const auto path = prepare(ctx, "compare.json");
  write_atomic(path, doc.dump(2) + "\n");
  result.files.push_back(path);
  result.exit_code = pass ? kOk : kCompareFailed;
  return result;
}

CommandResult run_ld(const CommandContext& ctx) {
  CommandResult result;
  const auto model = ctx.config.model();
  const auto& space = model.space;
  const auto times = ctx.config.times.points();
  const auto notes = closed_form_notes(model, result);
  const auto traj = solve_combined(model, times);

  struct Column {
    LinkSet g;
    Cylinder cylinder;
  };
  std::vector<std::string> header{"t", "mass"};
  std::vector<Column> columns;
  std::map<LinkSet::mask_type, LinkSet> spans;
  const std::size_t n = space.n_sites();
  for (std::uint64_t d = 1; d < (std::uint64_t{1} << n); ++d) {
    std::vector<std::size_t> sites;
    for (std::size_t i = 0; i < n; ++i) {
      if ((d >> i) & 1u) sites.push_back(i);
    }
    const LinkSet g = span_link_set(space, sites);
    spans.emplace(g.bits(), g);
    // every value in 1..M_i-1 at each site of D
    std::vector<std::size_t> values(sites.size(), 1);
    while (true) {
      std::map<std::size_t, std::size_t> assignment;
      std::string label = "F[";
      for (std::size_t k = 0; k < sites.size(); ++k) {
        assignment[sites[k]] = values[k];
        if (k != 0) label += ';';
        label += std::to_string(sites[k]) + "=" + std::to_string(values[k]);
      }
      header.push_back(label + "]");
      columns.push_back({g, Cylinder(std::move(assignment))});
      std::size_t k = 0;
      for (; k < sites.size(); ++k) {
        if (++values[k] < space.cardinality(sites[k])) break;
        values[k] = 1;
      }
      if (k == sites.size()) break;
    }
  }
  // without mutation or selection every column decays like b_G
  const bool pure_recombination = !model.has_mutation() && !model.has_selection();
  if (pure_recombination) {
    for (const auto& [bits, g] : spans) header.push_back("b" + links_label(g));
  }

  CsvWriter csv(header_lines(ctx, notes));
  csv.row(header);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& w = traj.states[k];
    std::vector<double> row{w.mass()};
    for (const auto& col : columns) row.push_back(kpoint_function(w, col.g, col.cylinder));
    if (pure_recombination) {
      for (const auto& [bits, g] : spans) row.push_back(coeff_b(g, times[k], model.rates));
    }
    csv.numbers(times[k], row);
  }
  const auto path = prepare(ctx, "ld.csv");
  write_atomic(path, csv.text());
  result.files.push_back(path);
  result.summary = std::to_string(columns.size()) + " disequilibria at " + std::to_string(times.size()) +
                   " time points";
  return result;
}

CommandResult run_equilibrium(const CommandContext& ctx) {
  CommandResult result;
  const auto model = ctx.config.model();
  const auto eq = equilibrium(model);
  result.warnings = eq.warnings;

  std::vector<std::string> notes;
  for (const auto& w : eq.warnings) notes.push_back("warning: " + w);
  CsvWriter csv(header_lines(ctx, notes));
  csv.row({"state", "weight"});
  const auto labels = state_labels(model.space);
  for (std::size_t i = 0; i < labels.size(); ++i) csv.row({labels[i], format_number(eq.measure[i])});
  const auto csv_path = prepare(ctx, "equilibrium.csv");
  write_atomic(csv_path, csv.text());
  result.files.push_back(csv_path);

  json doc = provenance(ctx);
  json rates = json::array();
  for (double r : eq.growth_rates) rates.push_back(json_number(r));
  doc["growth_rates"] = rates;
  doc["site_factors"] = eq.site_factors;
  doc["irreducible"] = eq.irreducible;
  doc["warnings"] = eq.warnings;
  doc["mass"] = eq.measure.mass();
  const auto json_path = prepare(ctx, "equilibrium.json");
  write_atomic(json_path, doc.dump(2) + "\n");
  result.files.push_back(json_path);
  result.summary = eq.irreducible ? "equilibrium found" : "equilibrium found (reducible operator)";
  return result;
}

CommandResult run_discrete(const CommandContext& ctx) {
  if (!ctx.config.crossover) throw ConfigError("crossover: required by the discrete command");
  CommandResult result;
  const auto model = ctx.config.model();
  CsvWriter csv(header_lines(ctx));
  auto cols = trajectory_header(model.space);
  cols.front() = "generation";
  csv.row(cols);
  Measure w = model.initial;
  csv.numbers(0.0, w.weights());
  for (std::size_t g = 1; g <= ctx.config.generations; ++g) {
    w = discrete_interference_step(model, w);
    csv.numbers(static_cast<double>(g), w.weights());
  }
  const auto path = prepare(ctx, "discrete.csv");
  write_atomic(path, csv.text());
  result.files.push_back(path);
  result.summary = std::to_string(ctx.config.generations) + " generations";
  return result;
}

}  // namespace ipl::cli
