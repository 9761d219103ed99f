#include "apfecbs/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace apfecbs {

using nlohmann::json;

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("scenario: expected a 3-vector, got " + j.dump());
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Configuration configuration(const json& j) {
  if (!j.is_array()) throw std::runtime_error("scenario: configuration must be an array");
  Configuration q(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) q[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return q;
}

json to_json(const Configuration& q) {
  json out = json::array();
  for (Eigen::Index i = 0; i < q.size(); ++i) out.push_back(q[i]);
  return out;
}

Transform pose(const json& j) {
  if (j.is_null()) return Transform::Identity();
  return make_transform(j.contains("xyz") ? vec3(j["xyz"]) : Vec3::Zero(),
                        j.contains("rpy") ? vec3(j["rpy"]) : Vec3::Zero());
}

json pose_json(const Transform& t) {
  const Eigen::Matrix3d r = t.linear();
  // ZYX extraction matching make_transform (yaw about z, then pitch, then roll).
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return json{{"xyz", to_json(Vec3(t.translation()))}, {"rpy", json::array({roll, pitch, yaw})}};
}

SerialChain parse_robot(const json& r) {
  const Transform base = pose(r.value("base", json()));
  std::vector<RevoluteJoint> joints;
  Transform tool = Transform::Identity();

  if (r.contains("planar")) {
    const auto& p = r["planar"];
    const auto links = p.at("links").get<std::vector<double>>();
    const double limit = p.value("limit", EIGEN_PI);
    double previous = 0.0;
    for (double length : links) {
      RevoluteJoint jt;
      jt.offset = make_transform(Vec3(previous, 0.0, 0.0));
      jt.lower = -limit;
      jt.upper = limit;
      joints.push_back(jt);
      previous = length;
    }
    tool = make_transform(Vec3(previous, 0.0, 0.0));
  } else {
    for (const auto& jj : r.at("joints")) {
      RevoluteJoint jt;
      jt.axis = jj.contains("axis") ? vec3(jj["axis"]) : Vec3::UnitZ();
      jt.offset = pose(jj.value("offset", json()));
      if (jj.contains("limits")) {
        jt.lower = jj["limits"].at(0).get<double>();
        jt.upper = jj["limits"].at(1).get<double>();
      }
      joints.push_back(jt);
    }
    tool = pose(r.value("tool", json()));
  }

  std::vector<std::vector<LinkSphere>> layout;
  const json spheres = r.value("spheres", json{{"per_link", 4}, {"radius", 0.05}});
  if (spheres.is_object()) {
    layout = SerialChain::uniform_layout(joints.size(), spheres.value("per_link", std::size_t{4}),
                                         spheres.value("radius", 0.05));
  } else {
    for (const auto& link : spheres) {
      std::vector<LinkSphere> list;
      for (const auto& s : link) list.push_back({s.at("s").get<double>(), s.at("r").get<double>()});
      layout.push_back(std::move(list));
    }
  }
  return SerialChain(base, std::move(joints), tool, std::move(layout));
}

json robot_json(const std::string& name, const SerialChain& chain) {
  json joints = json::array();
  for (const auto& jt : chain.joints()) {
    joints.push_back({{"axis", to_json(jt.axis)}, {"offset", pose_json(jt.offset)}, {"limits", {jt.lower, jt.upper}}});
  }
  json spheres = json::array();
  for (const auto& link : chain.sphere_layout()) {
    json list = json::array();
    for (const auto& s : link) list.push_back({{"s", s.position}, {"r", s.radius}});
    spheres.push_back(std::move(list));
  }
  return json{{"name", name},
              {"base", pose_json(chain.base())},
              {"joints", std::move(joints)},
              {"tool", pose_json(chain.tool())},
              {"spheres", std::move(spheres)}};
}

Obstacle parse_obstacle(const json& o) {
  const auto type = o.at("type").get<std::string>();
  if (type == "sphere") return Obstacle(SphereObstacle{vec3(o.at("center")), o.at("radius").get<double>()});
  if (type == "box") return Obstacle(BoxObstacle{vec3(o.at("min")), vec3(o.at("max"))});
  throw std::runtime_error("scenario: unknown obstacle type '" + type + "'");
}

json obstacle_json(const Obstacle& o) {
  if (const auto* s = std::get_if<SphereObstacle>(&o.shape())) {
    return json{{"type", "sphere"}, {"center", to_json(s->center)}, {"radius", s->radius}};
  }
  const auto& b = std::get<BoxObstacle>(o.shape());
  return json{{"type", "box"}, {"min", to_json(b.min)}, {"max", to_json(b.max)}};
}

void parse_params(const json& p, Scenario& sc) {
  auto& s = sc.search;
  s.timing.dt = p.value("dt", s.timing.dt);
  s.timing.v_max = p.value("v_max", s.timing.v_max);
  s.margin = p.value("margin", s.margin);
  s.w = p.value("w", s.w);
  s.time_limit = p.value("time_limit", s.time_limit);
  s.node_limit = p.value("node_limit", s.node_limit);
  s.dense_substeps = p.value("dense_substeps", s.dense_substeps);
  s.rescale_after_modify = p.value("rescale_after_modify", s.rescale_after_modify);
  if (p.contains("mode")) s.mode = parse_mode(p["mode"].get<std::string>());

  const json a = p.value("apf", json::object());
  sc.apf.k_rep = a.value("k_rep", sc.apf.k_rep);
  sc.apf.d0 = a.value("d0", sc.apf.d0);
  sc.apf.alpha = a.value("alpha", sc.apf.alpha);
  sc.apf.max_iter = a.value("max_iter", sc.apf.max_iter);
  sc.apf.rho = a.value("rho", sc.apf.rho);
  sc.apf.max_step = a.value("max_step", sc.apf.max_step);

  const json l = p.value("planner", json::object());
  auto& pl = sc.planner;
  pl.max_samples = l.value("max_samples", pl.max_samples);
  pl.goal_bias = l.value("goal_bias", pl.goal_bias);
  pl.eta = l.value("eta", pl.eta);
  pl.edge_resolution = l.value("edge_resolution", pl.edge_resolution);
  pl.shortcut_iterations = l.value("shortcut_iterations", pl.shortcut_iterations);
  pl.max_holds = l.value("max_holds", pl.max_holds);
  pl.seed = l.value("seed", pl.seed);
}

json params_json(const Scenario& sc) {
  const auto& s = sc.search;
  const auto& pl = sc.planner;
  return json{{"mode", std::string(to_string(s.mode))},
              {"w", s.w},
              {"dt", s.timing.dt},
              {"v_max", s.timing.v_max},
              {"margin", s.margin},
              {"time_limit", s.time_limit},
              {"node_limit", s.node_limit},
              {"dense_substeps", s.dense_substeps},
              {"rescale_after_modify", s.rescale_after_modify},
              {"apf",
               {{"k_rep", sc.apf.k_rep},
                {"d0", sc.apf.d0},
                {"alpha", sc.apf.alpha},
                {"max_iter", sc.apf.max_iter},
                {"rho", sc.apf.rho},
                {"max_step", sc.apf.max_step}}},
              {"planner",
               {{"max_samples", pl.max_samples},
                {"goal_bias", pl.goal_bias},
                {"eta", pl.eta},
                {"edge_resolution", pl.edge_resolution},
                {"shortcut_iterations", pl.shortcut_iterations},
                {"max_holds", pl.max_holds},
                {"seed", pl.seed}}}};
}

}  // namespace

void Scenario::validate() const {
  if (robots.empty()) throw std::invalid_argument("scenario '" + name + "': no robots");
  if (starts.size() != robots.size() || goals.size() != robots.size()) {
    throw std::invalid_argument("scenario '" + name + "': need one start and one goal per robot");
  }
  for (std::size_t r = 0; r < robots.size(); ++r) {
    const auto dof = robots[r].dof();
    if (static_cast<std::size_t>(starts[r].size()) != dof || static_cast<std::size_t>(goals[r].size()) != dof) {
      throw std::invalid_argument("scenario '" + name + "': robot " + std::to_string(r) +
                                  " start/goal dimension mismatch");
    }
    if (!is_config_free(robots[r], starts[r], obstacles)) {
      throw std::invalid_argument("scenario '" + name + "': start of robot " + std::to_string(r) + " is not free");
    }
    if (!is_config_free(robots[r], goals[r], obstacles)) {
      throw std::invalid_argument("scenario '" + name + "': goal of robot " + std::to_string(r) + " is not free");
    }
  }
  search.validate();
  apf.validate();
}

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario: ") + e.what());
  }
  const int schema = doc.value("schema", 0);
  if (schema != kScenarioSchema) {
    throw std::runtime_error("scenario: unsupported schema " + std::to_string(schema));
  }

  Scenario sc;
  try {
    sc.name = doc.value("name", std::string("scenario"));
    sc.seed = doc.value("seed", std::uint64_t{1});
    for (const auto& r : doc.at("robots")) {
      sc.robot_names.push_back(r.value("name", "robot" + std::to_string(sc.robots.size())));
      sc.robots.push_back(parse_robot(r));
    }
    for (const auto& o : doc.value("obstacles", json::array())) sc.obstacles.push_back(parse_obstacle(o));
    for (const auto& q : doc.value("starts", json::array())) sc.starts.push_back(configuration(q));
    for (const auto& q : doc.value("goals", json::array())) sc.goals.push_back(configuration(q));
    if (doc.contains("workspace")) {
      sc.workspace = Workspace{vec3(doc["workspace"].at("min")), vec3(doc["workspace"].at("max"))};
    }
    parse_params(doc.value("params", json::object()), sc);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario '") + sc.name + "': " + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string scenario_to_json(const Scenario& sc) {
  json robots = json::array();
  for (std::size_t r = 0; r < sc.robots.size(); ++r) {
    const std::string name = r < sc.robot_names.size() ? sc.robot_names[r] : "robot" + std::to_string(r);
    robots.push_back(robot_json(name, sc.robots[r]));
  }
  json obstacles = json::array();
  for (const auto& o : sc.obstacles) obstacles.push_back(obstacle_json(o));
  json starts = json::array();
  for (const auto& q : sc.starts) starts.push_back(to_json(q));
  json goals = json::array();
  for (const auto& q : sc.goals) goals.push_back(to_json(q));

  json doc{{"schema", kScenarioSchema},
           {"name", sc.name},
           {"seed", sc.seed},
           {"robots", std::move(robots)},
           {"obstacles", std::move(obstacles)},
           {"starts", std::move(starts)},
           {"goals", std::move(goals)},
           {"params", params_json(sc)}};
  if (sc.workspace) doc["workspace"] = {{"min", to_json(sc.workspace->min)}, {"max", to_json(sc.workspace->max)}};
  return doc.dump(2);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  out << scenario_to_json(scenario) << '\n';
}

}  // namespace apfecbs
