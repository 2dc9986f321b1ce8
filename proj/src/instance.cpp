#include "drsub/instance.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace drsub {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_vector(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt17(v[i]);
  }
  out += ']';
}

void emit_matrix(std::string& out, const std::vector<std::vector<double>>& m) {
  out += '[';
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (r) out += ',';
    emit_vector(out, m[r]);
  }
  out += ']';
}

void emit_points(std::string& out, const std::vector<std::array<double, 2>>& pts) {
  out += '[';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ',';
    out += '[';
    out += fmt17(pts[i][0]);
    out += ',';
    out += fmt17(pts[i][1]);
    out += ']';
  }
  out += ']';
}

std::vector<double> parse_vector(const json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

std::vector<std::vector<double>> parse_matrix(const json& j) {
  std::vector<std::vector<double>> m;
  for (const auto& row : j) m.push_back(parse_vector(row));
  return m;
}

std::vector<std::array<double, 2>> parse_points(const json& j) {
  std::vector<std::array<double, 2>> pts;
  for (const auto& p : j) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return pts;
}

}  // namespace

const char* kind_name(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::quadratic: return "quadratic";
    case InstanceKind::uncap_covering: return "uncap_covering";
    case InstanceKind::cap_covering: return "cap_covering";
    case InstanceKind::influence_max: return "influence_max";
  }
  return "unknown";
}

InstanceKind kind_from_name(const std::string& name) {
  if (name == "quadratic") return InstanceKind::quadratic;
  if (name == "uncap_covering") return InstanceKind::uncap_covering;
  if (name == "cap_covering") return InstanceKind::cap_covering;
  if (name == "influence_max") return InstanceKind::influence_max;
  throw std::invalid_argument("unknown instance kind: " + name);
}

Instance gen_instance(InstanceKind kind, int n, int size_param, double budget,
                      std::uint64_t seed) {
  Instance inst;
  inst.kind = kind;
  inst.seed = seed;
  inst.n = n;
  inst.budget = budget;
  switch (kind) {
    case InstanceKind::quadratic:
      inst.payload = problems::gen_quadratic(n, size_param, seed);
      break;
    case InstanceKind::uncap_covering:
      inst.payload = problems::gen_covering(n, size_param, budget, false, seed);
      break;
    case InstanceKind::cap_covering:
      inst.payload = problems::gen_covering(n, size_param, budget, true, seed);
      break;
    case InstanceKind::influence_max:
      inst.payload = problems::gen_influence(n, budget, problems::GKind::contest, seed);
      break;
  }
  return inst;
}

std::string to_json(const Instance& inst) {
  std::string out = "{\"kind\":\"";
  out += kind_name(inst.kind);
  out += "\",\"seed\":";
  out += std::to_string(inst.seed);
  out += ",\"n\":";
  out += std::to_string(inst.n);
  out += ",\"budget\":";
  out += fmt17(inst.budget);
  out += ",\"payload\":{";
  switch (inst.kind) {
    case InstanceKind::quadratic: {
      const auto& q = std::get<problems::QuadraticInstance>(inst.payload);
      out += "\"H\":";
      emit_matrix(out, q.H);
      out += ",\"h\":";
      emit_vector(out, q.h);
      out += ",\"A\":";
      emit_matrix(out, q.A);
      out += ",\"b\":";
      emit_vector(out, q.b);
      break;
    }
    case InstanceKind::uncap_covering:
    case InstanceKind::cap_covering: {
      const auto& c = std::get<problems::CoveringInstance>(inst.payload);
      out += "\"facility_xy\":";
      emit_points(out, c.facility_xy);
      out += ",\"demand_xy\":";
      emit_points(out, c.demand_xy);
      out += ",\"weights\":";
      emit_vector(out, c.weights);
      out += ",\"dbar\":";
      out += fmt17(c.dbar);
      out += ",\"budget\":";
      out += fmt17(c.budget);
      out += ",\"a\":";
      emit_vector(out, c.a);
      if (c.capacitated()) {
        out += ",\"K\":";
        emit_vector(out, c.capacity);
      }
      break;
    }
    case InstanceKind::influence_max: {
      const auto& f = std::get<problems::InfluenceInstance>(inst.payload);
      out += "\"nodes\":";
      out += std::to_string(f.nodes);
      out += ",\"arcs\":[";
      for (std::size_t i = 0; i < f.arcs.size(); ++i) {
        if (i) out += ',';
        out += '[';
        out += std::to_string(f.arcs[i].first);
        out += ',';
        out += std::to_string(f.arcs[i].second);
        out += ']';
      }
      out += "],\"p_live\":";
      out += fmt17(f.p_live);
      out += ",\"scenario_seeds\":[";
      for (std::size_t i = 0; i < f.scenario_seeds.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(f.scenario_seeds[i]);
      }
      out += "],\"g_kind\":\"";
      out += (f.g_kind == problems::GKind::contest) ? "contest" : "identity";
      out += "\",\"budget\":";
      out += fmt17(f.budget);
      out += ",\"a\":";
      emit_vector(out, f.a);
      break;
    }
  }
  out += "}}";
  return out;
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance parse error: ") + e.what());
  }
  Instance inst;
  try {
    inst.kind = kind_from_name(j.at("kind").get<std::string>());
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.n = j.at("n").get<int>();
    inst.budget = j.at("budget").get<double>();
    const json& p = j.at("payload");
    switch (inst.kind) {
      case InstanceKind::quadratic: {
        problems::QuadraticInstance q;
        q.H = parse_matrix(p.at("H"));
        q.h = parse_vector(p.at("h"));
        q.A = parse_matrix(p.at("A"));
        q.b = parse_vector(p.at("b"));
        inst.payload = std::move(q);
        break;
      }
      case InstanceKind::uncap_covering:
      case InstanceKind::cap_covering: {
        problems::CoveringInstance c;
        c.facility_xy = parse_points(p.at("facility_xy"));
        c.demand_xy = parse_points(p.at("demand_xy"));
        c.weights = parse_vector(p.at("weights"));
        c.dbar = p.at("dbar").get<double>();
        c.budget = p.at("budget").get<double>();
        c.a = parse_vector(p.at("a"));
        if (inst.kind == InstanceKind::cap_covering) c.capacity = parse_vector(p.at("K"));
        problems::rebuild_coverage_sets(c);
        inst.payload = std::move(c);
        break;
      }
      case InstanceKind::influence_max: {
        problems::InfluenceInstance f;
        f.nodes = p.at("nodes").get<int>();
        for (const auto& arc : p.at("arcs"))
          f.arcs.emplace_back(arc.at(0).get<int>(), arc.at(1).get<int>());
        f.p_live = p.at("p_live").get<double>();
        for (const auto& s : p.at("scenario_seeds"))
          f.scenario_seeds.push_back(s.get<std::uint64_t>());
        const std::string g = p.at("g_kind").get<std::string>();
        if (g == "contest")
          f.g_kind = problems::GKind::contest;
        else if (g == "identity")
          f.g_kind = problems::GKind::identity;
        else
          throw std::invalid_argument("unknown g_kind: " + g);
        f.budget = p.at("budget").get<double>();
        f.a = parse_vector(p.at("a"));
        problems::rebuild_reach_sets(f);
        inst.payload = std::move(f);
        break;
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance field error: ") + e.what());
  }
  return inst;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

OracleProblem make_oracle(const Instance& inst) {
  OracleProblem problem;
  problem.dimension = inst.n;
  problem.box = BoxBounds::unit(inst.n);

  switch (inst.kind) {
    case InstanceKind::quadratic: {
      auto q = std::make_shared<const problems::QuadraticInstance>(
          std::get<problems::QuadraticInstance>(inst.payload));
      problem.value = [q](const std::vector<double>& x) {
        return problems::quadratic_value(*q, x);
      };
      problem.gradient = [q](const std::vector<double>& x) {
        return problems::quadratic_grad(*q, x);
      };
      problem.constraints = {q->A, q->b};
      break;
    }
    case InstanceKind::uncap_covering: {
      auto c = std::make_shared<const problems::CoveringInstance>(
          std::get<problems::CoveringInstance>(inst.payload));
      problem.value = [c](const std::vector<double>& x) {
        return problems::covering_value_uncap(*c, x);
      };
      problem.gradient = [c](const std::vector<double>& x) {
        return problems::covering_grad_uncap(*c, x);
      };
      problem.constraints = {{std::vector<double>(inst.n, 1.0)}, {inst.budget}};
      break;
    }
    case InstanceKind::cap_covering: {
      auto c = std::make_shared<const problems::CoveringInstance>(
          std::get<problems::CoveringInstance>(inst.payload));
      auto table = std::make_shared<const problems::GmeTable>(
          problems::build_cap_coverage_table(*c));
      problem.value = [c, table](const std::vector<double>& x) {
        return problems::covering_value_cap(*c, *table, x);
      };
      problem.gradient = [c, table](const std::vector<double>& x) {
        return problems::covering_grad_cap(*c, *table, x);
      };
      problem.constraints = {{std::vector<double>(inst.n, 1.0)}, {inst.budget}};
      break;
    }
    case InstanceKind::influence_max: {
      auto f = std::make_shared<const problems::InfluenceInstance>(
          std::get<problems::InfluenceInstance>(inst.payload));
      auto table = std::make_shared<const problems::GmeTable>(
          problems::build_influence_table(*f));
      problem.value = [f, table](const std::vector<double>& x) {
        return problems::influence_value(*f, *table, x);
      };
      problem.gradient = [f, table](const std::vector<double>& x) {
        return problems::influence_grad(*f, *table, x);
      };
      problem.constraints = {{std::vector<double>(inst.n, 1.0)}, {inst.budget}};
      break;
    }
  }
  return problem;
}

}  // namespace drsub
