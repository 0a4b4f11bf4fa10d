#include "ipl/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ipl/errors.hpp"

namespace ipl::cli {

using nlohmann::json;

std::vector<double> TimeGrid::points() const {
  std::vector<double> out;
  switch (kind) {
    case Kind::list:
      out = values;
      break;
    case Kind::linear:
      if (count < 2) throw ConfigError("times.count: a linear grid needs at least 2 points");
      for (std::size_t k = 0; k < count; ++k) out.push_back(end * static_cast<double>(k) / static_cast<double>(count - 1));
      break;
    case Kind::log: {
      if (!(start > 0.0) || !(end > start)) throw ConfigError("times: a log grid needs 0 < start < end");
      if (count < 2) throw ConfigError("times.count: a log grid needs at least 2 points");
      out.push_back(0.0);
      const double ratio = std::log(end / start);
      for (std::size_t k = 0; k < count; ++k) {
        out.push_back(start * std::exp(ratio * static_cast<double>(k) / static_cast<double>(count - 1)));
      }
      out.back() = end;
      break;
    }
  }
  if (out.empty() || out.front() != 0.0) throw ConfigError("times: the grid must start at 0");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!(out[k] > out[k - 1])) throw ConfigError("times: the grid must be strictly increasing");
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required field");
  return obj.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<double>> number_rows(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(numbers(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

SquareMatrix matrix(const json& j, const std::string& path) {
  const auto rows = number_rows(j, path);
  const std::size_t n = rows.size();
  std::vector<double> flat;
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) fail(path + "[" + std::to_string(r) + "]", "matrix must be square");
    flat.insert(flat.end(), rows[r].begin(), rows[r].end());
  }
  return SquareMatrix(n, std::move(flat));
}

TimeGrid parse_times(const json& j) {
  TimeGrid g;
  if (j.is_array()) {
    g.kind = TimeGrid::Kind::list;
    g.values = numbers(j, "times");
    return g;
  }
  if (!j.is_object()) fail("times", "expected an array or an object");
  const auto kind = field(j, "kind", "times");
  if (kind == "list") {
    g.kind = TimeGrid::Kind::list;
    g.values = numbers(field(j, "values", "times"), "times.values");
  } else if (kind == "linear") {
    g.kind = TimeGrid::Kind::linear;
    g.end = number(field(j, "end", "times"), "times.end");
    g.count = count(field(j, "count", "times"), "times.count");
  } else if (kind == "log") {
    g.kind = TimeGrid::Kind::log;
    g.start = number(field(j, "start", "times"), "times.start");
    g.end = number(field(j, "end", "times"), "times.end");
    g.count = count(field(j, "count", "times"), "times.count");
  } else {
    fail("times.kind", "expected \"list\", \"linear\" or \"log\"");
  }
  return g;
}

InitialSpec parse_initial(const json& j) {
  InitialSpec s;
  if (j.is_string()) {
    if (j == "uniform") s.kind = InitialSpec::Kind::uniform;
    else if (j == "random") s.kind = InitialSpec::Kind::random;
    else fail("initial", "expected \"uniform\", \"random\" or an object");
    return s;
  }
  if (j.is_array()) {
    s.kind = InitialSpec::Kind::weights;
    s.weights = numbers(j, "initial");
    return s;
  }
  if (!j.is_object()) fail("initial", "expected a string, an array of weights or an object");
  const auto kind = field(j, "kind", "initial");
  if (j.contains("mass")) s.mass = number(j.at("mass"), "initial.mass");
  if (kind == "weights") {
    s.kind = InitialSpec::Kind::weights;
    s.weights = numbers(field(j, "weights", "initial"), "initial.weights");
  } else if (kind == "uniform") {
    s.kind = InitialSpec::Kind::uniform;
  } else if (kind == "product") {
    s.kind = InitialSpec::Kind::product;
    s.factors = number_rows(field(j, "factors", "initial"), "initial.factors");
  } else if (kind == "random") {
    s.kind = InitialSpec::Kind::random;
  } else {
    fail("initial.kind", "expected \"weights\", \"uniform\", \"product\" or \"random\"");
  }
  if (!(s.mass > 0.0)) fail("initial.mass", "must be positive");
  return s;
}

json emit_matrix(const SquareMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config", "expected a JSON object");
  if (doc.contains("schema") && count(doc.at("schema"), "schema") != static_cast<std::size_t>(kSchemaVersion)) {
    fail("schema", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
  }

  RunConfig c;
  const auto& sites = field(doc, "sites", "config");
  if (!sites.is_array() || sites.empty()) fail("sites", "expected a nonempty array of cardinalities");
  for (std::size_t i = 0; i < sites.size(); ++i) c.sites.push_back(count(sites[i], "sites[" + std::to_string(i) + "]"));
  c.rho = doc.contains("rho") ? numbers(doc.at("rho"), "rho") : std::vector<double>{};

  if (doc.contains("mutation")) {
    const auto& m = doc.at("mutation");
    if (!m.is_object()) fail("mutation", "expected an object with \"matrices\" and optional \"mu\"");
    const auto& mats = field(m, "matrices", "mutation");
    if (!mats.is_array()) fail("mutation.matrices", "expected an array of matrices");
    std::vector<SquareMatrix> list;
    for (std::size_t i = 0; i < mats.size(); ++i) list.push_back(matrix(mats[i], "mutation.matrices[" + std::to_string(i) + "]"));
    c.mutation = std::move(list);
    if (m.contains("mu")) c.mu = numbers(m.at("mu"), "mutation.mu");
  }
  if (doc.contains("fitness")) c.fitness = number_rows(doc.at("fitness"), "fitness");
  if (doc.contains("crossover")) c.crossover = numbers(doc.at("crossover"), "crossover");
  c.initial = doc.contains("initial") ? parse_initial(doc.at("initial")) : InitialSpec{};
  if (doc.contains("times")) c.times = parse_times(doc.at("times"));
  if (doc.contains("dt")) c.dt = number(doc.at("dt"), "dt");
  if (doc.contains("threshold")) c.threshold = number(doc.at("threshold"), "threshold");
  if (doc.contains("generations")) c.generations = count(doc.at("generations"), "generations");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (!(c.dt > 0.0)) fail("dt", "must be positive");
  if (!(c.threshold > 0.0)) fail("threshold", "must be positive");

  c.times.points();
  c.model();  // full validation
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string emit_config(const RunConfig& c) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["sites"] = c.sites;
  doc["rho"] = c.rho;
  if (c.mutation) {
    json mats = json::array();
    for (const auto& m : *c.mutation) mats.push_back(emit_matrix(m));
    doc["mutation"]["matrices"] = mats;
    if (!c.mu.empty()) doc["mutation"]["mu"] = c.mu;
  }
  if (c.fitness) doc["fitness"] = *c.fitness;
  if (c.crossover) doc["crossover"] = *c.crossover;

  json init;
  switch (c.initial.kind) {
    case InitialSpec::Kind::weights:
      init = {{"kind", "weights"}, {"weights", c.initial.weights}, {"mass", c.initial.mass}};
      break;
    case InitialSpec::Kind::uniform:
      init = {{"kind", "uniform"}, {"mass", c.initial.mass}};
      break;
    case InitialSpec::Kind::product:
      init = {{"kind", "product"}, {"factors", c.initial.factors}, {"mass", c.initial.mass}};
      break;
    case InitialSpec::Kind::random:
      init = {{"kind", "random"}, {"mass", c.initial.mass}};
      break;
  }
  doc["initial"] = init;

  switch (c.times.kind) {
    case TimeGrid::Kind::list:
      doc["times"] = {{"kind", "list"}, {"values", c.times.values}};
      break;
    case TimeGrid::Kind::linear:
      doc["times"] = {{"kind", "linear"}, {"end", c.times.end}, {"count", c.times.count}};
      break;
    case TimeGrid::Kind::log:
      doc["times"] = {{"kind", "log"}, {"start", c.times.start}, {"end", c.times.end}, {"count", c.times.count}};
      break;
  }
  doc["dt"] = c.dt;
  doc["threshold"] = c.threshold;
  doc["generations"] = c.generations;
  doc["seed"] = c.seed;
  return doc.dump(2) + "\n";
}

std::string model_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : emit_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

Measure random_initial(const TypeSpace& space, std::uint64_t seed, double mass) {
  // mt19937_64 output is fixed by the standard; distributions are not, so map bits by hand
  std::mt19937_64 gen(seed);
  std::vector<double> w(space.total_size());
  double total = 0.0;
  for (auto& x : w) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    x = 0.05 + 0.95 * u;
    total += x;
  }
  for (auto& x : w) x *= mass / total;
  return Measure(space, std::move(w));
}

ModelSpec RunConfig::model() const {
  ModelSpec m;
  try {
    m.space = TypeSpace(sites);
  } catch (const std::invalid_argument& e) {
    fail("sites", e.what());
  }
  if (rho.size() != m.space.n_links()) {
    fail("rho", "expected " + std::to_string(m.space.n_links()) + " rates (one per link), got " + std::to_string(rho.size()));
  }
  try {
    m.rates = RecombinationRates(rho);
  } catch (const ValidationError& e) {
    fail("rho", e.what());
  }
  if (mutation) {
    if (mutation->size() != sites.size()) fail("mutation.matrices", "expected one matrix per site");
    if (!mu.empty() && mu.size() != sites.size()) fail("mutation.mu", "expected one scale per site");
    std::vector<SiteGenerator> gens;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if ((*mutation)[i].size() != sites[i]) {
        fail("mutation.matrices[" + std::to_string(i) + "]", "dimension must equal the site cardinality");
      }
      try {
        gens.push_back(validate_generator((*mutation)[i], i, mu.empty() ? 1.0 : mu[i]));
      } catch (const ValidationError& e) {
        fail("mutation.matrices[" + std::to_string(i) + "]", e.what());
      }
    }
    m.mutation = MutationModel(m.space, std::move(gens));
  } else if (!mu.empty()) {
    fail("mutation.mu", "scales given without matrices");
  }
  if (fitness) {
    try {
      m.fitness = FitnessModel(m.space, *fitness);
    } catch (const ValidationError& e) {
      fail("fitness", e.what());
    }
  }
  if (crossover) {
    try {
      m.crossover = CrossoverProbabilities(*crossover);
    } catch (const std::invalid_argument& e) {
      fail("crossover", e.what());
    }
  }

  switch (initial.kind) {
    case InitialSpec::Kind::weights:
      if (initial.weights.size() != m.space.total_size()) {
        fail("initial.weights", "expected " + std::to_string(m.space.total_size()) + " weights");
      }
      try {
        m.initial = Measure(m.space, initial.weights);
      } catch (const std::invalid_argument& e) {
        fail("initial.weights", e.what());
      }
      break;
    case InitialSpec::Kind::uniform:
      m.initial = Measure::uniform(m.space, initial.mass);
      break;
    case InitialSpec::Kind::product: {
      if (initial.factors.size() != sites.size()) fail("initial.factors", "expected one vector per site");
      std::vector<SignedMeasure> factors;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const std::string path = "initial.factors[" + std::to_string(i) + "]";
        if (initial.factors[i].size() != sites[i]) fail(path, "length must equal the site cardinality");
        double total = 0.0;
        for (double x : initial.factors[i]) {
          if (x < 0.0) fail(path, "entries must be nonnegative");
          total += x;
        }
        if (!(total > 0.0)) fail(path, "entries must not all vanish");
        std::vector<double> p = initial.factors[i];
        for (auto& x : p) x /= total;
        const std::size_t site[] = {i};
        factors.emplace_back(m.space.subspace(site), std::move(p));
      }
      m.initial = Measure(product(m.space, partition_of(m.space, m.space.all_links()), factors)).scaled(initial.mass);
      break;
    }
    case InitialSpec::Kind::random:
      m.initial = random_initial(m.space, seed, initial.mass);
      break;
  }
  m.validate();
  return m;
}

}  // namespace ipl::cli
