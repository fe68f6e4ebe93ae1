#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dagot/collapse.hpp"
#include "dagot/federated.hpp"
#include "dagot/taskgraph.hpp"
#include "dagot/wceto.hpp"

// File formats. A task file is one JSON object:
//   {
//     "period": 40, "deadline": 40,
//     "objects": [{"id":0,"model":"linear","c1":10,"factor":0.5},
//                 {"id":1,"model":"table","values":[10,15]}],
//     "nodes":   [{"id":0,"object":0,"threads":1}, ...],   // "pseudo": true on
//     "edges":   [[0,1], ...],                             // structural nodes
//     "merges":  {"3": [5, 7]}                             // optional audit info
//   }
// Node ids are arbitrary unique integers; edges reference them. Collapsed
// output keeps the surviving original ids, so merge histories stay readable.
namespace dagot {

using nlohmann::json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json wceto_to_json(ObjectId id, const WcetoFn& fn) {
  json j;
  j["id"] = id;
  if (fn.model == WcetoFn::Model::linear) {
    j["model"] = "linear";
    j["c1"] = fn.c1;
    j["factor"] = fn.factor;
  } else {
    j["model"] = "table";
    j["values"] = fn.values;
  }
  return j;
}

inline WcetoFn wceto_from_json(const json& j) {
  std::string model = j.at("model").get<std::string>();
  if (model == "linear")
    return WcetoFn::linear(j.at("c1").get<double>(), j.at("factor").get<double>());
  if (model == "table") {
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    if (values.size() == 1 && values[0] == 0.0) {
      // zero-cost structural node: bypass the positive-cost table factory
      WcetoFn fn;
      fn.model = WcetoFn::Model::table;
      fn.values = std::move(values);
      return fn;
    }
    return WcetoFn::table(std::move(values));
  }
  throw config_error("unknown wceto model: " + model);
}

inline json task_to_json(const Task& t, const std::map<NodeId, std::vector<NodeId>>* merges = nullptr) {
  const TaskGraph& g = t.graph;
  json j;
  j["period"] = t.period;
  j["deadline"] = t.deadline;
  json objects = json::array();
  for (const auto& [id, fn] : g.objects) objects.push_back(wceto_to_json(id, fn));
  j["objects"] = std::move(objects);
  json nodes = json::array();
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    const Node& n = g.nodes[v];
    if (!n.alive) continue;
    json jn;
    jn["id"] = n.ext_id;
    jn["object"] = n.object;
    jn["threads"] = n.threads;
    if (n.pseudo) jn["pseudo"] = true;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    if (!g.nodes[v].alive) continue;
    for (NodeId w : g.succ[v])
      edges.push_back(json::array({g.nodes[v].ext_id, g.nodes[static_cast<size_t>(w)].ext_id}));
  }
  j["edges"] = std::move(edges);
  if (merges && !merges->empty()) {
    json jm = json::object();
    for (const auto& [rep, absorbed] : *merges) {
      std::vector<int> ext;
      for (NodeId v : absorbed) ext.push_back(g.nodes[static_cast<size_t>(v)].ext_id);
      jm[std::to_string(g.nodes[static_cast<size_t>(rep)].ext_id)] = ext;
    }
    j["merges"] = std::move(jm);
  }
  return j;
}

inline Task task_from_json(const json& j) {
  Task t;
  t.period = j.at("period").get<double>();
  t.deadline = j.at("deadline").get<double>();
  TaskGraph g;
  for (const json& jo : j.at("objects"))
    g.objects.emplace(jo.at("id").get<int>(), wceto_from_json(jo));
  std::map<int, NodeId> by_ext;
  for (const json& jn : j.at("nodes")) {
    Node n;
    n.ext_id = jn.at("id").get<int>();
    n.object = jn.at("object").get<int>();
    n.threads = jn.at("threads").get<int>();
    n.pseudo = jn.value("pseudo", false);
    if (n.threads < 1) throw config_error("task json: threads must be >= 1");
    if (!g.objects.count(n.object))
      throw config_error("task json: node references unknown object");
    if (by_ext.count(n.ext_id)) throw config_error("task json: duplicate node id");
    by_ext[n.ext_id] = static_cast<NodeId>(g.nodes.size());
    g.nodes.push_back(n);
  }
  g.succ.assign(g.nodes.size(), {});
  g.pred.assign(g.nodes.size(), {});
  for (const json& je : j.at("edges")) {
    int a = je.at(0).get<int>(), b = je.at(1).get<int>();
    if (!by_ext.count(a) || !by_ext.count(b))
      throw config_error("task json: edge references unknown node");
    g.add_edge(by_ext[a], by_ext[b]);
  }
  if (detect_cycle(g)) throw config_error("task json: graph contains a cycle");
  locate_endpoints(g);
  t.graph = std::move(g);
  return t;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error("malformed json in " + path + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline Task load_task_file(const std::string& path) {
  try {
    return task_from_json(load_json_file(path));
  } catch (const json::exception& e) {
    throw config_error("bad task file " + path + ": " + e.what());
  }
}

inline json verdict_to_json(Approach approach, const AnalyzeResult& r) {
  json j;
  j["approach"] = to_string(approach);
  j["schedulable"] = r.verdict.schedulable;
  j["reason"] = to_string(r.verdict.reason);
  j["m_high"] = r.verdict.allocation ? r.verdict.allocation->m_high : r.m_high;
  j["m_low"] = r.verdict.allocation ? r.verdict.allocation->m_low : 0;
  json per_task = json::array();
  for (const PerTaskOutcome& t : r.per_task) {
    json jt;
    jt["id"] = t.task_index;
    if (t.m_i) jt["m_i"] = *t.m_i;
    jt["collapsed_pairs"] = t.collapsed_pairs;
    per_task.push_back(std::move(jt));
  }
  j["per_task"] = std::move(per_task);
  return j;
}

}  // namespace dagot
