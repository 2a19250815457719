#pragma once

#include "degtree/ball.hpp"
#include "degtree/forest.hpp"
#include "degtree/sampler.hpp"
#include "degtree/tree.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace degtree {

using nlohmann::json;

// --- Tree JSON: {"n": int, "edges": [[u,v], ...]} ----------------------

inline json tree_to_json(const LabeledTree& t) {
  json e = json::array();
  for (auto& [u, v] : t.edges) e.push_back({u, v});
  return json{{"n", t.n}, {"edges", std::move(e)}};
}

inline LabeledTree tree_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("edges")) throw std::invalid_argument("tree JSON: missing fields");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("tree JSON: bad edge");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return LabeledTree(j.at("n").get<int>(), std::move(edges));  // ctor re-validates
}

// --- Ball JSON: nested {"children": [<ball>, ...]} ---------------------

inline json ball_to_json_node(const RootedBall& b, int v) {
  json kids = json::array();
  for (int c : b.children[v]) kids.push_back(ball_to_json_node(b, c));
  return json{{"children", std::move(kids)}};
}

inline json ball_to_json(const RootedBall& b) { return ball_to_json_node(b, 0); }

inline RootedBall ball_from_json(const json& j, int radius) {
  std::vector<int> parents{-1};
  std::vector<const json*> queue{&j};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (!queue[i]->contains("children")) throw std::invalid_argument("ball JSON: missing children");
    for (const auto& kid : queue[i]->at("children")) {
      parents.push_back(static_cast<int>(i));
      queue.push_back(&kid);
    }
  }
  return make_ball(radius, std::move(parents));
}

// --- Decorated forest JSON ---------------------------------------------

inline json forest_to_json(const DecoratedForest& f) {
  json e = json::array();
  for (auto& [u, v] : f.edges) e.push_back({u, v});
  json j{{"m", f.m}, {"edges", std::move(e)}, {"r", f.r}};
  if (!f.labels.empty()) j["labels"] = f.labels;
  return j;
}

inline DecoratedForest forest_from_json(const json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  std::vector<int> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<int>>();
  return DecoratedForest(j.at("m").get<int>(), std::move(edges), j.at("r").get<std::vector<int>>(),
                         std::move(labels));
}

// --- JSONL batches ------------------------------------------------------

inline json config_to_json(const SamplerConfig& c) {
  return json{{"n", c.n},
              {"method", c.method == SampleMethod::chain ? "chain" : "direct"},
              {"seed", c.seed},
              {"count", c.count},
              {"steps", c.steps},
              {"burnin", c.burnin},
              {"thin", c.thin},
              {"direct_method", c.direct_method == DirectMethod::dp          ? "dp"
                                : c.direct_method == DirectMethod::rejection ? "rejection"
                                                                             : "auto"},
              {"threads", c.threads}};
}

inline SamplerConfig config_from_json(const json& j) {
  SamplerConfig c;
  c.n = j.at("n").get<int>();
  c.method = j.at("method").get<std::string>() == "chain" ? SampleMethod::chain : SampleMethod::direct;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.count = j.value("count", std::uint64_t{1});
  c.steps = j.value("steps", std::uint64_t{0});
  c.burnin = j.value("burnin", std::uint64_t{0});
  c.thin = j.value("thin", std::uint64_t{1});
  const std::string dm = j.value("direct_method", "auto");
  c.direct_method = dm == "dp"          ? DirectMethod::dp
                    : dm == "rejection" ? DirectMethod::rejection
                                        : DirectMethod::auto_select;
  c.threads = j.value("threads", 1);
  return c;
}

// Header line with the sampler config, then one tree JSON per line.
inline void write_batch_jsonl(std::ostream& os, const SampleBatch& batch) {
  os << json{{"type", "degtree-batch"}, {"config", config_to_json(batch.config)}}.dump() << "\n";
  for (const auto& t : batch.trees) os << tree_to_json(t).dump() << "\n";
}

// Streams trees without holding the batch in memory.
inline SamplerConfig read_batch_jsonl(std::istream& is,
                                      const std::function<void(const LabeledTree&)>& sink) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("batch JSONL: empty input");
  const json header = json::parse(line);
  if (header.value("type", "") != "degtree-batch")
    throw std::invalid_argument("batch JSONL: missing header line");
  SamplerConfig cfg = config_from_json(header.at("config"));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    sink(tree_from_json(json::parse(line)));
  }
  return cfg;
}

inline SampleBatch read_batch_jsonl_all(std::istream& is) {
  SampleBatch b;
  b.config = read_batch_jsonl(is, [&](const LabeledTree& t) { b.trees.push_back(t); });
  return b;
}

// --- Exact rationals in JSON/CSV ---------------------------------------

inline std::string exactq_to_string(const ExactQ& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q) << "/" << boost::multiprecision::denominator(q);
  return os.str();
}

inline std::string hex_key(const std::string& key) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(key.size() * 2);
  for (unsigned char c : key) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

}  // namespace degtree
