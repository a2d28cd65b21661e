// Copyright 2026 The RiskEngine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "model/model.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"

namespace riskengine::model {
namespace {

using nlohmann::json;

// Input iterator that counts newlines as the parser consumes characters.
class LineCountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  LineCountingIterator(const char* p, int* line) : p_(p), line_(line) {}
  reference operator*() const { return *p_; }
  LineCountingIterator& operator++() {
    if (*p_ == '\n') ++*line_;
    ++p_;
    return *this;
  }
  LineCountingIterator operator++(int) {
    LineCountingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const LineCountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const LineCountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_;
  int* line_;
};

std::string Escape(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Records the line on which each value of the document ends.
class LineMapper : public nlohmann::json_sax<json> {
 public:
  explicit LineMapper(const int* line) : line_(line) {}

  std::map<std::string, int> lines;

  bool null() override { return Value(); }
  bool boolean(bool) override { return Value(); }
  bool number_integer(number_integer_t) override { return Value(); }
  bool number_unsigned(number_unsigned_t) override { return Value(); }
  bool number_float(number_float_t, const string_t&) override { return Value(); }
  bool string(string_t&) override { return Value(); }
  bool binary(binary_t&) override { return Value(); }
  bool start_object(std::size_t) override {
    Open();
    stack_.push_back({false, 0, ""});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = k;
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    Advance();
    return true;
  }
  bool start_array(std::size_t) override {
    Open();
    stack_.push_back({true, 0, ""});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    Advance();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    bool array;
    int index;
    std::string key;
  };

  std::string Path() const {
    std::string p;
    for (const Frame& f : stack_) p += "/" + (f.array ? std::to_string(f.index) : Escape(f.key));
    return p;
  }
  void Open() { lines.emplace(Path(), *line_); }
  void Advance() {
    if (!stack_.empty() && stack_.back().array) ++stack_.back().index;
  }
  bool Value() {
    Open();
    Advance();
    return true;
  }

  const int* line_;
  std::vector<Frame> stack_;
};

class Reader {
 public:
  Reader(const json& doc, std::map<std::string, int> lines) : doc_(doc), lines_(std::move(lines)) {}

  [[noreturn]] void Fail(const std::string& path, const std::string& msg) const {
    std::string p = path;
    auto it = lines_.find(p);
    while (it == lines_.end() && !p.empty()) {
      p = p.substr(0, p.rfind('/'));
      it = lines_.find(p);
    }
    std::ostringstream os;
    os << "line " << (it == lines_.end() ? 1 : it->second) << " (" << (path.empty() ? "/" : path)
       << "): " << msg;
    throw ModelError(os.str());
  }

  const json& At(const std::string& path) const { return doc_.at(json::json_pointer(path)); }

  double Number(const std::string& path) const {
    const json& v = At(path);
    if (!v.is_number()) Fail(path, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) Fail(path, "number must be finite");
    return x;
  }

  Vector Numbers(const std::string& path, int expected = -1) const {
    const json& v = At(path);
    if (!v.is_array()) Fail(path, "expected an array of numbers");
    if (expected >= 0 && static_cast<int>(v.size()) != expected) {
      Fail(path, "expected " + std::to_string(expected) + " entries, found " + std::to_string(v.size()));
    }
    Vector out(static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = Number(path + "/" + std::to_string(i));
    return out;
  }

  std::vector<Vector> Rows(const std::string& path, int width) const {
    const json& v = At(path);
    if (!v.is_array()) Fail(path, "expected an array of rows");
    std::vector<Vector> rows;
    for (size_t i = 0; i < v.size(); ++i) rows.push_back(Numbers(path + "/" + std::to_string(i), width));
    return rows;
  }

  Matrix RowMatrix(const std::string& path, int width) const {
    std::vector<Vector> rows = Rows(path, width);
    Matrix m(static_cast<int>(rows.size()), width);
    for (size_t i = 0; i < rows.size(); ++i) m.row(static_cast<int>(i)) = rows[i].transpose();
    return m;
  }

  std::string String(const std::string& path) const {
    const json& v = At(path);
    if (!v.is_string()) Fail(path, "expected a string");
    return v.get<std::string>();
  }

  bool Has(const std::string& path) const { return doc_.contains(json::json_pointer(path)); }

  const json& Object(const std::string& path) const {
    const json& v = At(path);
    if (!v.is_object()) Fail(path, "expected an object");
    return v;
  }

  void Keys(const std::string& path, std::initializer_list<const char*> allowed) const {
    for (const auto& [k, v] : Object(path).items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) Fail(path + "/" + Escape(k), "unknown field \"" + k + "\"");
    }
  }

 private:
  const json& doc_;
  std::map<std::string, int> lines_;
};

// Runs `f`, re-raising structural and model errors anchored at `path`.
template <class F>
auto Anchored(const Reader& r, const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StructuralError& e) {
    r.Fail(path, e.what());
  } catch (const DomainError& e) {
    r.Fail(path, e.what());
  } catch (const ModelError& e) {
    std::string what = e.what();
    if (what.rfind("line ", 0) == 0) throw;
    r.Fail(path, what);
  }
}

Cone ReadCone(const Reader& r, const std::string& path, int d) {
  const json& c = r.At(path);
  if (c.is_string()) {
    std::string kind = c.get<std::string>();
    if (kind == "full") return Cone::Full(d);
    if (kind == "orthant") return Cone::Orthant(d);
    if (kind == "zero") return Cone::Zero(d);
    r.Fail(path, "cone must be \"full\", \"orthant\", \"zero\" or {\"generators\": [...]}");
  }
  r.Keys(path, {"generators"});
  std::vector<Vector> gens = r.Rows(path + "/generators", d);
  return Anchored(r, path, [&] { return Cone::FromGenerators(d, gens); });
}

DeterminingSet ReadSet(const Reader& r, const std::string& path, const SpacePtr& space) {
  r.Object(path);
  const std::string family = r.String(path + "/family");
  const int m = space->size();
  if (family == "point_mass") {
    r.Keys(path, {"family"});
    return DeterminingSet::PointMass(space);
  }
  if (family == "tail_var") {
    r.Keys(path, {"family", "lambda"});
    double lambda = r.Number(path + "/lambda");
    return Anchored(r, path + "/lambda", [&] { return DeterminingSet::TailVaR(space, lambda); });
  }
  if (family == "weighted_var") {
    r.Keys(path, {"family", "weights", "levels"});
    Vector w = r.Numbers(path + "/weights");
    Vector l = r.Numbers(path + "/levels", static_cast<int>(w.size()));
    return Anchored(r, path, [&] {
      return DeterminingSet::WeightedVaR(space, std::vector<double>(w.data(), w.data() + w.size()),
                                         std::vector<double>(l.data(), l.data() + l.size()));
    });
  }
  if (family == "vertices" || family == "halfspaces" || family == "both") {
    r.Keys(path, {"family", "z", "A", "b"});
    std::vector<Vector> z;
    Matrix a;
    Vector b;
    if (family != "halfspaces") z = r.Rows(path + "/z", m);
    if (family != "vertices") {
      a = r.RowMatrix(path + "/A", m);
      b = r.Numbers(path + "/b", static_cast<int>(a.rows()));
    }
    return Anchored(r, path, [&] {
      if (family == "vertices") return DeterminingSet::FromVertices(space, z);
      if (family == "halfspaces") return DeterminingSet::FromHalfspaces(space, a, b);
      return DeterminingSet::FromBoth(space, z, a, b);
    });
  }
  r.Fail(path + "/family", "unknown family \"" + family + "\"");
}

Market ReadMarket(const Reader& r, const std::string& path, const SpacePtr& space) {
  r.Keys(path, {"S0", "S1", "cone", "polytope"});
  Vector s0 = r.Numbers(path + "/S0");
  const int d = static_cast<int>(s0.size());
  Matrix s1 = r.RowMatrix(path + "/S1", space->size());
  if (s1.rows() != d) r.Fail(path + "/S1", "expected one payoff row per entry of S0");
  bool has_cone = r.Has(path + "/cone"), has_poly = r.Has(path + "/polytope");
  if (has_cone == has_poly) r.Fail(path, "exactly one of \"cone\" and \"polytope\" is required");
  if (has_poly) {
    std::vector<Vector> pts = r.Rows(path + "/polytope", d);
    if (pts.empty()) r.Fail(path + "/polytope", "polytope needs at least one point");
    return Anchored(r, path, [&] { return Market::WithPolytope(space, s0, s1, pts); });
  }
  Cone cone = ReadCone(r, path + "/cone", d);
  return Anchored(r, path, [&] { return Market(space, s0, s1, cone); });
}

}  // namespace

const DeterminingSet& Model::Set(const std::string& name) const {
  auto it = sets.find(name);
  if (it == sets.end()) throw ModelError("unknown determining set \"" + name + "\"");
  return it->second;
}

const Market& Model::GetMarket(const std::string& name) const {
  auto it = markets.find(name);
  if (it == markets.end()) throw ModelError("unknown market \"" + name + "\"");
  return it->second;
}

const RandomVariable& Model::Variable(const std::string& name) const {
  auto it = variables.find(name);
  if (it == variables.end()) throw ModelError("unknown variable \"" + name + "\"");
  return it->second;
}

const std::vector<AgentEntry>& Model::Agents(const std::string& name) const {
  auto it = agents.find(name);
  if (it == agents.end()) throw ModelError("unknown agent group \"" + name + "\"");
  return it->second;
}

const FirmEntry& Model::Firm(const std::string& name) const {
  auto it = firms.find(name);
  if (it == firms.end()) throw ModelError("unknown firm \"" + name + "\"");
  return it->second;
}

Model LoadModel(const std::string& text) {
  int line = 1;
  LineMapper mapper(&line);
  const char* begin = text.data();
  const char* end = begin + text.size();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int err_line = 1;
    for (size_t i = 0; i < std::min(e.byte, text.size()); ++i) err_line += text[i] == '\n';
    throw ModelError("line " + std::to_string(err_line) + ": invalid JSON: " + e.what());
  }
  json::sax_parse(LineCountingIterator(begin, &line), LineCountingIterator(end, &line), &mapper);
  Reader r(doc, mapper.lines);
  if (!doc.is_object()) r.Fail("", "model must be a JSON object");
  r.Keys("", {"scenarios", "p", "sets", "markets", "variables", "agents", "firms"});

  Model out;
  out.canonical = doc.dump();
  const json& labels = r.At("/scenarios");
  if (!labels.is_array() || labels.empty()) r.Fail("/scenarios", "expected a nonempty array of labels");
  std::vector<std::string> names;
  for (size_t i = 0; i < labels.size(); ++i) names.push_back(r.String("/scenarios/" + std::to_string(i)));
  const int m = static_cast<int>(names.size());
  Vector p = r.Has("/p") ? r.Numbers("/p", m) : Vector::Constant(m, 1.0 / m);
  out.space = Anchored(r, "/p", [&] { return ScenarioSpace::Make(names, p); });

  if (r.Has("/sets")) {
    for (const auto& [k, v] : r.Object("/sets").items()) {
      out.sets.emplace(k, ReadSet(r, "/sets/" + Escape(k), out.space));
    }
  }
  if (r.Has("/markets")) {
    for (const auto& [k, v] : r.Object("/markets").items()) {
      out.markets.emplace(k, ReadMarket(r, "/markets/" + Escape(k), out.space));
    }
  }
  if (r.Has("/variables")) {
    for (const auto& [k, v] : r.Object("/variables").items()) {
      out.variables.emplace(k, RandomVariable(r.Numbers("/variables/" + Escape(k), m)));
    }
  }
  if (r.Has("/agents")) {
    for (const auto& [k, v] : r.Object("/agents").items()) {
      std::string base = "/agents/" + Escape(k);
      if (!v.is_array() || v.empty()) r.Fail(base, "expected a nonempty array of agents");
      std::vector<AgentEntry> group;
      for (size_t i = 0; i < v.size(); ++i) {
        std::string path = base + "/" + std::to_string(i);
        r.Keys(path, {"set", "market", "endowment"});
        AgentEntry a;
        a.set = r.String(path + "/set");
        if (!out.sets.count(a.set)) r.Fail(path + "/set", "unknown determining set \"" + a.set + "\"");
        if (r.Has(path + "/market")) {
          a.market = r.String(path + "/market");
          if (!out.markets.count(a.market)) r.Fail(path + "/market", "unknown market \"" + a.market + "\"");
        }
        a.endowment = r.Has(path + "/endowment") ? r.String(path + "/endowment") : "";
        if (!a.endowment.empty() && !out.variables.count(a.endowment)) {
          r.Fail(path + "/endowment", "unknown variable \"" + a.endowment + "\"");
        }
        group.push_back(a);
      }
      out.agents.emplace(k, group);
    }
  }
  if (r.Has("/firms")) {
    for (const auto& [k, v] : r.Object("/firms").items()) {
      std::string path = "/firms/" + Escape(k);
      r.Keys(path, {"units", "h", "cone"});
      FirmEntry f;
      const json& units = r.At(path + "/units");
      if (!units.is_array() || units.empty()) r.Fail(path + "/units", "expected a nonempty array of variable names");
      for (size_t i = 0; i < units.size(); ++i) {
        std::string u = r.String(path + "/units/" + std::to_string(i));
        if (!out.variables.count(u)) r.Fail(path + "/units/" + std::to_string(i), "unknown variable \"" + u + "\"");
        f.units.push_back(u);
      }
      const int d = static_cast<int>(f.units.size());
      f.h = r.Numbers(path + "/h", d);
      f.cone = r.Has(path + "/cone") ? ReadCone(r, path + "/cone", d) : Cone::Full(d);
      out.firms.emplace(k, f);
    }
  }
  return out;
}

Model LoadModelFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file \"" + path + "\"");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return LoadModel(text);
}

}  // namespace riskengine::model
