#include "clab/serialize.hpp"

#include <cstdio>
#include <fstream>

#include "clab/errors.hpp"

namespace clab {

ojson group_to_json(const FinAbGroup& g) { return ojson{{"cyclic", g.orders}}; }

FinAbGroup group_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("cyclic") || !j["cyclic"].is_array())
    throw ParseError("group: expected {\"cyclic\": [...]}");
  std::vector<long long> orders;
  for (const auto& v : j["cyclic"]) {
    if (!v.is_number_integer()) throw ParseError("group: orders must be integers");
    orders.push_back(v.get<long long>());
  }
  try {
    return FinAbGroup(orders);
  } catch (const Error& e) {
    throw ParseError(std::string("group: ") + e.what());
  }
}

ojson system_to_json(const FiniteSystem& x) {
  ojson j;
  j["gamma"] = group_to_json(x.gamma);
  j["points"] = x.n_points;
  ojson weights = ojson::array();
  for (const Rational& w : x.weights) weights.push_back(w.str());
  j["weights"] = weights;
  j["actions"] = x.action;
  if (x.label_width > 0) {
    ojson labels = ojson::array();
    for (int p = 0; p < x.n_points; ++p)
      labels.push_back(std::vector<long long>(x.label_row(p),
                                              x.label_row(p) + x.label_width));
    j["labels"] = labels;
  }
  if (x.rotation) {
    ojson rot;
    rot["z"] = group_to_json(x.rotation->z);
    ojson phi = ojson::array();
    for (const GroupElement& e : x.rotation->phi.images) phi.push_back(e);
    rot["phi"] = phi;
    j["rotation"] = rot;
  }
  return j;
}

FiniteSystem system_from_json(const ojson& j) {
  if (!j.is_object()) throw ParseError("system: expected an object");
  for (const char* key : {"gamma", "points", "weights", "actions"})
    if (!j.contains(key)) throw ParseError(std::string("system: missing ") + key);
  FinAbGroup gamma = group_from_json(j["gamma"]);
  int n = 0;
  try {
    n = j["points"].get<int>();
  } catch (const std::exception&) {
    throw ParseError("system: points must be an integer");
  }
  std::vector<Rational> weights;
  for (const auto& w : j["weights"]) {
    if (!w.is_string()) throw ParseError("system: weights must be \"p/q\" strings");
    weights.push_back(parse_rational(w.get<std::string>()));
  }
  if ((int)weights.size() != n) throw ParseError("system: weight count mismatch");
  std::vector<std::vector<int>> actions;
  for (const auto& perm : j["actions"]) {
    std::vector<int> p;
    for (const auto& v : perm) p.push_back(v.get<int>());
    actions.push_back(std::move(p));
  }
  FiniteSystem x;
  try {
    x = make_system(gamma, std::move(weights), std::move(actions));
  } catch (const Error& e) {
    throw ParseError(std::string("system: ") + e.what());
  }
  if (j.contains("labels")) {
    const auto& labels = j["labels"];
    if ((int)labels.size() != n) throw ParseError("system: label count mismatch");
    x.label_width = labels.empty() ? 0 : int(labels[0].size());
    for (const auto& row : labels) {
      if ((int)row.size() != x.label_width)
        throw ParseError("system: ragged label rows");
      for (const auto& v : row) x.labels.push_back(v.get<long long>());
    }
  }
  if (j.contains("rotation")) {
    const auto& rot = j["rotation"];
    FinAbGroup z = group_from_json(rot.at("z"));
    std::vector<GroupElement> images;
    for (const auto& img : rot.at("phi")) {
      GroupElement e;
      for (const auto& v : img) e.push_back(v.get<long long>());
      images.push_back(std::move(e));
    }
    try {
      x.rotation = RotationInfo{z, make_hom(gamma, z, images)};
    } catch (const Error& e) {
      throw ParseError(std::string("system rotation: ") + e.what());
    }
    if (z.size() != n) throw ParseError("system rotation: size mismatch");
  }
  return x;
}

ojson fiber_to_json(const Fiber& f) {
  if (f.circle) return ojson{{"circle", f.modulus()}};
  return group_to_json(f.group);
}

Fiber fiber_from_json(const ojson& j) {
  if (j.is_object() && j.contains("circle")) {
    if (!j["circle"].is_number_integer())
      throw ParseError("fiber: circle modulus must be an integer");
    try {
      return circle_fiber(j["circle"].get<long long>());
    } catch (const Error& e) {
      throw ParseError(std::string("fiber: ") + e.what());
    }
  }
  return finite_fiber(group_from_json(j));
}

ojson cocycle_to_json(const Cocycle& rho) {
  ojson j;
  j["base"] = system_to_json(*rho.base);
  j["fiber"] = fiber_to_json(rho.fiber);
  ojson tables = ojson::array();
  for (const auto& t : rho.tables) {
    ojson row = ojson::array();
    for (long long v : t) {
      if (rho.fiber.circle) row.push_back(rho.fiber.circle_value(v).str());
      else row.push_back(rho.fiber.group.element_at(v));
    }
    tables.push_back(row);
  }
  j["tables"] = tables;
  return j;
}

Cocycle cocycle_from_json(const ojson& j) {
  if (!j.is_object()) throw ParseError("cocycle: expected an object");
  for (const char* key : {"base", "fiber", "tables"})
    if (!j.contains(key)) throw ParseError(std::string("cocycle: missing ") + key);
  auto base = std::make_shared<FiniteSystem>(system_from_json(j["base"]));
  Fiber fiber = fiber_from_json(j["fiber"]);
  std::vector<std::vector<long long>> tables;
  for (const auto& row : j["tables"]) {
    std::vector<long long> t;
    for (const auto& v : row) {
      if (fiber.circle) {
        if (!v.is_string()) throw ParseError("cocycle: circle values must be \"p/q\"");
        CircleValue c = CircleValue::parse(v.get<std::string>());
        if (fiber.modulus() % c.den != 0)
          throw ParseError("cocycle: denominator " + std::to_string(c.den) +
                           " outside the circle modulus");
        t.push_back(c.num * (fiber.modulus() / c.den));
      } else {
        GroupElement e;
        for (const auto& r : v) e.push_back(r.get<long long>());
        try {
          t.push_back(fiber.group.index_of(e));
        } catch (const Error& err) {
          throw ParseError(std::string("cocycle: ") + err.what());
        }
      }
    }
    tables.push_back(std::move(t));
  }
  try {
    return make_cocycle(base, fiber, std::move(tables));
  } catch (const ConsistencyError&) {
    throw; // consistency failures keep their own type for exit-code mapping
  } catch (const Error& e) {
    throw ParseError(std::string("cocycle: ") + e.what());
  }
}

ojson transfer_to_json(const TransferFunction& f) {
  ojson values = ojson::array();
  for (long long v : f.values) {
    if (f.fiber.circle) values.push_back(f.fiber.circle_value(v).str());
    else values.push_back(f.fiber.group.element_at(v));
  }
  return ojson{{"fiber", fiber_to_json(f.fiber)}, {"values", values}};
}

ojson partition_to_json(const FactorPartition& p) {
  return ojson{{"blocks", p.n_blocks}, {"block_of", p.block_of}};
}

ojson load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return ojson::parse(in);
  } catch (const std::exception& e) {
    throw ParseError("cannot parse " + path + ": " + e.what());
  }
}

void write_json_atomic(const std::string& path, const ojson& j) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write " + tmp);
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("cannot rename " + tmp + " to " + path);
}

} // namespace clab
