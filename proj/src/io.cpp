#include "treewco/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "treewco/errors.hpp"

#ifndef TREEWCO_SOURCE_GOLDEN_DIR
#define TREEWCO_SOURCE_GOLDEN_DIR "golden"
#endif

namespace treewco {

namespace {

std::string child(const std::string& where, const std::string& key) {
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return where + "/" + k;
}

const Json& require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw LoadError(where, "expected an object");
  return j;
}

void allow_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw LoadError(child(where, k), "unknown key");
    }
  }
}

const Json* find(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string get_string(const Json& j, const char* key, const std::string& where) {
  const Json* v = find(j, key);
  if (!v) throw LoadError(child(where, key), "missing");
  if (!v->is_string()) throw LoadError(child(where, key), "expected a string");
  return v->get<std::string>();
}

std::int64_t as_int(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw LoadError(where, "expected an integer");
}

std::size_t as_count(const Json& v, const std::string& where) {
  const std::int64_t x = as_int(v, where);
  if (x < 0) throw LoadError(where, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

std::optional<std::size_t> opt_count(const Json& j, const char* key, const std::string& where) {
  const Json* v = find(j, key);
  if (!v) return std::nullopt;
  return as_count(*v, child(where, key));
}

double as_real(const Json& v, const std::string& where) {
  if (!v.is_number()) throw LoadError(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw LoadError(where, "expected a finite number");
  return d;
}

double opt_real(const Json& j, const char* key, const std::string& where, double fallback) {
  const Json* v = find(j, key);
  return v ? as_real(*v, child(where, key)) : fallback;
}

std::int64_t parse_key(const std::string& key, const std::string& where) {
  std::int64_t x = 0;
  const char* b = key.data();
  const char* e = b + key.size();
  const auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e) throw LoadError(where, "key is not an integer");
  return x;
}

enum class KeyMode { Id, Label };

KeyMode key_mode(const Json& j, const std::string& where) {
  const Json* k = find(j, "key");
  if (!k) return KeyMode::Id;
  if (*k == "id") return KeyMode::Id;
  if (*k == "label") return KeyMode::Label;
  throw LoadError(child(where, "key"), "expected \"id\" or \"label\"");
}

VertexId resolve(const RootedTree& t, std::int64_t x, KeyMode mode, const std::string& where) {
  if (mode == KeyMode::Label) {
    try {
      return t.vertex_with_label(x);
    } catch (const Error&) {
      throw LoadError(where, "label " + std::to_string(x) + " is outside the truncation");
    }
  }
  if (x < 0 || !t.contains(static_cast<VertexId>(x))) {
    throw LoadError(where, "vertex " + std::to_string(x) + " is outside the truncation");
  }
  return static_cast<VertexId>(x);
}

// A vertex given in params as {"<id_key>": id} or {"label": n}.
VertexId param_vertex(const RootedTree& t, const Json& params, const char* id_key,
                      const std::string& where) {
  if (const Json* v = find(params, id_key)) {
    return resolve(t, as_int(*v, child(where, id_key)), KeyMode::Id, child(where, id_key));
  }
  if (const Json* v = find(params, "label")) {
    return resolve(t, as_int(*v, child(where, "label")), KeyMode::Label, child(where, "label"));
  }
  throw LoadError(where, std::string("needs \"") + id_key + "\" or \"label\"");
}

const Json& params_of(const Json& j, const std::string& where) {
  static const Json empty = Json::object();
  const Json* p = find(j, "params");
  if (!p) return empty;
  return require_object(*p, child(where, "params"));
}

void require_line(const RootedTree& t, const std::string& name, const std::string& where) {
  if (t.family() != Family::ZLine) throw LoadError(where, name + " is only defined on the integer line");
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void write_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  out += buf;
}

void write_stable(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        write_stable(out, v, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_stable(out, j[i], indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_stable(out, j[i], indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

Json vertex_json(const RootedTree& t, VertexId v) {
  Json j = {{"id", v}};
  if (t.family() == Family::ZLine) j["label"] = t.label(v);
  return j;
}

Json labels_json(const RootedTree& t, const std::vector<VertexId>& vs) {
  Json a = Json::array();
  for (VertexId v : vs) a.push_back(v == kNoVertex ? Json(nullptr) : Json(t.label(v)));
  return a;
}

Json profile_json(const std::vector<std::pair<std::size_t, double>>& p) {
  Json a = Json::array();
  for (const auto& [n, v] : p) a.push_back(Json::array({n, v}));
  return a;
}

std::string fmt(double x) {
  std::string s;
  write_number(s, x);
  return s;
}

std::vector<std::pair<std::size_t, double>> tail_profile(
    const WeightedCompOp& op, double (*tail)(const WeightedCompOp&, std::size_t)) {
  std::vector<std::pair<std::size_t, double>> p;
  for (std::size_t n = 0; n < op.tree().truncation_depth(); ++n) p.emplace_back(n, tail(op, n));
  return p;
}

Json isometry_json(const IsometryVerdict& v, const RootedTree& t) {
  Json j = {{"isometry", v.isometry}, {"reason", v.reason}, {"observed", v.observed}};
  j["witness"] = v.witness ? vertex_json(t, *v.witness) : Json(nullptr);
  return j;
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
    throw LoadError("", source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

SpecDocument read_spec_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  SpecDocument doc{path.string(), ss.str(), {}};
  doc.json = parse_json_text(doc.text, doc.source);
  return doc;
}

namespace {

// Walks JSON text tracking the pointer of each value; stops at `target`.
class PointerLocator {
 public:
  PointerLocator(const std::string& text, const std::string& target) : s_(text), target_(target) {}

  std::optional<std::size_t> run() {
    value("");
    return found_;
  }

 private:
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r' || s_[i_] == '\n')) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
        const char e = s_[++i_];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += s_[i_];
      }
      ++i_;
    }
    ++i_;
    return out;
  }

  void value(const std::string& path) {
    if (found_) return;
    ws();
    if (i_ >= s_.size()) return;
    if (path == target_) {
      found_ = line_;
      return;
    }
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      while (!found_) {
        ws();
        if (i_ >= s_.size() || s_[i_] == '}') break;
        if (s_[i_] != '"') return;
        const std::string key = string_token();
        ws();
        if (i_ >= s_.size() || s_[i_] != ':') return;
        ++i_;
        value(child(path, key));
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      for (std::size_t k = 0; !found_; ++k) {
        ws();
        if (i_ >= s_.size() || s_[i_] == ']') break;
        value(path + "/" + std::to_string(k));
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '}' && s_[i_] != '\n' &&
             s_[i_] != ' ') {
        ++i_;
      }
    }
  }

  const std::string& s_;
  const std::string& target_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::optional<std::size_t> found_;
};

}  // namespace

std::optional<std::size_t> pointer_line(const std::string& text, std::string pointer) {
  while (true) {
    if (auto line = PointerLocator(text, pointer).run()) return line;
    if (pointer.empty()) return std::nullopt;
    pointer.erase(pointer.rfind('/'));
  }
}

std::string describe_load_error(const LoadError& e, const SpecDocument& doc) {
  // syntax errors already carry source:line:col
  if (e.pointer().empty() && std::string_view(e.what()).rfind(doc.source, 0) == 0) return e.what();
  std::string out = doc.source;
  if (auto line = pointer_line(doc.text, e.pointer())) out += ":" + std::to_string(*line);
  return out + ": " + e.what();
}

std::string dump_stable(const Json& j) {
  std::string out;
  write_stable(out, j, 0);
  out += "\n";
  return out;
}

TreeSpec tree_spec_from_json(const Json& j, const std::string& where) {
  require_object(j, where);
  allow_keys(j, where, {"schema", "family", "depth", "q", "seed", "min_children", "max_children",
                        "edges", "root"});
  if (const Json* s = find(j, "schema"); s && as_int(*s, child(where, "schema")) != kSchemaVersion) {
    throw LoadError(child(where, "schema"), "unsupported schema version");
  }
  const std::string family = get_string(j, "family", where);
  TreeSpec spec;
  spec.depth = opt_count(j, "depth", where);
  auto need_depth = [&]() {
    if (!spec.depth) throw LoadError(child(where, "depth"), "missing");
    return *spec.depth;
  };
  if (family == "zline") {
    spec = TreeSpec::zline(need_depth());
  } else if (family == "homogeneous") {
    spec = TreeSpec::homogeneous(opt_count(j, "q", where).value_or(2), need_depth());
  } else if (family == "random") {
    spec = TreeSpec::random(need_depth(), opt_count(j, "seed", where).value_or(0),
                            opt_count(j, "min_children", where).value_or(1),
                            opt_count(j, "max_children", where).value_or(3));
  } else if (family == "explicit") {
    const Json* edges = find(j, "edges");
    if (!edges || !edges->is_array()) throw LoadError(child(where, "edges"), "expected an array of [parent, child]");
    std::vector<std::pair<VertexId, VertexId>> es;
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const std::string at = child(child(where, "edges"), std::to_string(i));
      const Json& e = (*edges)[i];
      if (!e.is_array() || e.size() != 2) throw LoadError(at, "expected [parent, child]");
      es.emplace_back(as_count(e[0], at + "/0"), as_count(e[1], at + "/1"));
    }
    spec = TreeSpec::explicit_edges(std::move(es), opt_count(j, "root", where).value_or(0), spec.depth);
  } else {
    throw LoadError(child(where, "family"), "unknown family '" + family + "'");
  }
  return spec;
}

TreePtr load_tree(const Json& j, const std::string& where) {
  const TreeSpec spec = tree_spec_from_json(j, where);
  try {
    return build_tree(spec);
  } catch (const LoadError&) {
    throw;
  } catch (const Error& e) {
    throw LoadError(where, e.what());
  }
}

SelfMap load_map(const Json& j, const TreePtr& tree, const std::string& where) {
  require_object(j, where);
  const RootedTree& t = *tree;
  const std::string kind = get_string(j, "kind", where);
  try {
    if (kind == "table") {
      allow_keys(j, where, {"kind", "map", "key", "domain_depth", "codomain_depth"});
      const KeyMode mode = key_mode(j, where);
      const auto dd = opt_count(j, "domain_depth", where);
      const auto cd = opt_count(j, "codomain_depth", where);
      const std::size_t dom_depth = dd.value_or(t.truncation_depth());
      const Json* m = find(j, "map");
      const std::string mw = child(where, "map");
      if (!m) throw LoadError(mw, "missing");
      require_object(*m, mw);
      std::vector<VertexId> images(t.size(), kNoVertex);
      for (const auto& [k, v] : m->items()) {
        const std::string at = child(mw, k);
        const VertexId src = resolve(t, parse_key(k, at), mode, at);
        if (t.depth(src) > dom_depth) throw LoadError(at, "vertex lies outside the map domain");
        images[src] = resolve(t, as_int(v, at), mode, at);
      }
      for (VertexId v = 0; v < t.size(); ++v) {
        if (t.depth(v) <= dom_depth && images[v] == kNoVertex) {
          throw LoadError(mw, "no image for vertex " + std::to_string(mode == KeyMode::Label ? t.label(v)
                                                                                            : static_cast<std::int64_t>(v)));
        }
      }
      return SelfMap(tree, std::move(images), dd, cd);
    }
    if (kind != "builtin") throw LoadError(child(where, "kind"), "expected \"table\" or \"builtin\"");
    allow_keys(j, where, {"kind", "name", "params"});
    const std::string name = get_string(j, "name", where);
    const Json& p = params_of(j, where);
    const std::string pw = child(where, "params");
    if (name == "identity") return identity_map(tree);
    if (name == "parent") return parent_map(tree);
    if (name == "double") {
      require_line(t, name, child(where, "name"));
      return doubling_map(tree);
    }
    if (name == "zfold") {
      require_line(t, name, child(where, "name"));
      return line_fold_map(tree);
    }
    if (name == "constant") {
      allow_keys(p, pw, {"target", "label"});
      return constant_map(tree, param_vertex(t, p, "target", pw));
    }
    if (name == "random") {
      allow_keys(p, pw, {"seed"});
      std::mt19937_64 rng(opt_count(p, "seed", pw).value_or(0));
      std::vector<VertexId> images(t.size());
      for (auto& w : images) w = static_cast<VertexId>(rng() % t.size());
      return SelfMap(tree, std::move(images));
    }
    throw LoadError(child(where, "name"), "unknown map builtin '" + name + "'");
  } catch (const LoadError&) {
    throw;
  } catch (const Error& e) {
    throw LoadError(where, e.what());
  }
}

VertexFunction load_function(const Json& j, const TreePtr& tree, const SelfMap* phi,
                             const std::string& where) {
  require_object(j, where);
  const RootedTree& t = *tree;
  const std::string kind = get_string(j, "kind", where);
  try {
    if (kind == "table") {
      allow_keys(j, where, {"kind", "values", "key", "default"});
      const KeyMode mode = key_mode(j, where);
      const Json* vals = find(j, "values");
      const std::string vw = child(where, "values");
      if (!vals) throw LoadError(vw, "missing");
      require_object(*vals, vw);
      const Json* dflt = find(j, "default");
      std::vector<double> out(t.size(), dflt ? as_real(*dflt, child(where, "default")) : 0.0);
      std::vector<bool> seen(t.size(), false);
      for (const auto& [k, v] : vals->items()) {
        const std::string at = child(vw, k);
        const VertexId u = resolve(t, parse_key(k, at), mode, at);
        out[u] = as_real(v, at);
        seen[u] = true;
      }
      if (!dflt) {
        for (VertexId v = 0; v < t.size(); ++v) {
          if (!seen[v]) throw LoadError(vw, "no value for vertex " + std::to_string(v) + " and no default");
        }
      }
      return VertexFunction(tree, std::move(out));
    }
    if (kind != "builtin") throw LoadError(child(where, "kind"), "expected \"table\" or \"builtin\"");
    allow_keys(j, where, {"kind", "name", "params"});
    const std::string name = get_string(j, "name", where);
    const std::string nw = child(where, "name");
    const Json& p = params_of(j, where);
    const std::string pw = child(where, "params");
    if (name == "F_N") {
      allow_keys(p, pw, {"N"});
      const auto n = opt_count(p, "N", pw);
      if (!n) throw LoadError(child(pw, "N"), "missing");
      return depth_cap(tree, *n);
    }
    if (name == "g") {
      allow_keys(p, pw, {"n", "r"});
      const auto n = opt_count(p, "n", pw);
      if (!n) throw LoadError(child(pw, "n"), "missing");
      const Json* r = find(p, "r");
      if (!r) throw LoadError(child(pw, "r"), "missing");
      return power_ramp(tree, *n, as_real(*r, child(pw, "r")));
    }
    if (name == "chi") {
      allow_keys(p, pw, {"w", "label"});
      return indicator(tree, param_vertex(t, p, "w", pw));
    }
    if (name == "eta") {
      allow_keys(p, pw, {"v", "label"});
      return sector_indicator(tree, param_vertex(t, p, "v", pw));
    }
    if (name == "const") {
      allow_keys(p, pw, {"c"});
      return VertexFunction::constant(tree, opt_real(p, "c", pw, 1.0));
    }
    if (name == "alternating") {
      allow_keys(p, pw, {"M"});
      const double m = opt_real(p, "M", pw, 1.0);
      // (-1)^n on the line, (-1)^|v| elsewhere
      return VertexFunction::from(tree, [&](VertexId v) {
        const std::int64_t k = t.family() == Family::ZLine ? t.label(v) : static_cast<std::int64_t>(t.depth(v));
        return (k % 2 == 0) ? m : -m;
      });
    }
    if (name == "random") {
      allow_keys(p, pw, {"seed", "lo", "hi"});
      std::mt19937_64 rng(opt_count(p, "seed", pw).value_or(0));
      const double lo = opt_real(p, "lo", pw, -1.0);
      const double hi = opt_real(p, "hi", pw, 1.0);
      if (!(lo <= hi)) throw LoadError(pw, "needs lo <= hi");
      return VertexFunction::from(tree, [&](VertexId) { return lo + (hi - lo) * unit_draw(rng); });
    }
    if (name == "zfold_weight") {
      require_line(t, name, nw);
      return line_fold_weight(tree);
    }
    if (name == "recip_label") {
      require_line(t, name, nw);
      return VertexFunction::from(tree, [&](VertexId v) {
        const std::int64_t n = t.label(v);
        return n == 0 ? 1.0 : 1.0 / static_cast<double>(n < 0 ? -n : n);
      });
    }
    if (name == "recip_phi_depth") {
      allow_keys(p, pw, {"power"});
      if (!phi) throw LoadError(nw, "recip_phi_depth needs the map to be loaded first");
      const double power = opt_real(p, "power", pw, 1.0);
      return VertexFunction::from(tree, [&](VertexId v) {
        if (!phi->in_domain(v)) return 0.0;
        return std::pow(static_cast<double>(phi->image_depth(v)) + 1.0, -power);
      });
    }
    throw LoadError(nw, "unknown function builtin '" + name + "'");
  } catch (const LoadError&) {
    throw;
  } catch (const Error& e) {
    throw LoadError(where, e.what());
  }
}

LoadedSpecs load_specs(const Json& tree, const Json& psi, const Json& phi) {
  TreePtr t = load_tree(tree, "/tree");
  SelfMap m = load_map(phi, t, "/phi");
  VertexFunction f = load_function(psi, t, &m, "/psi");
  return {std::move(t), std::move(m), std::move(f)};
}

Json tree_to_json(const RootedTree& t) {
  return {{"family", std::string(family_name(t.family()))},
          {"depth", t.truncation_depth()},
          {"size", t.size()},
          {"root", t.root()}};
}

Json tree_to_spec_json(const RootedTree& t) {
  Json edges = Json::array();
  for (const auto& [p, c] : t.edges()) edges.push_back(Json::array({p, c}));
  return {{"schema", kSchemaVersion},
          {"family", "explicit"},
          {"depth", t.truncation_depth()},
          {"root", t.root()},
          {"edges", std::move(edges)}};
}

Json function_to_json(const VertexFunction& f) {
  Json vals = Json::object();
  for (VertexId v = 0; v < f.size(); ++v) vals[std::to_string(v)] = f.values()[v];
  return {{"kind", "table"}, {"values", std::move(vals)}};
}

Json map_to_json(const SelfMap& phi) {
  Json m = Json::object();
  for (VertexId v : phi.domain()) m[std::to_string(v)] = phi(v);
  return {{"kind", "table"},
          {"map", std::move(m)},
          {"domain_depth", phi.domain_depth()},
          {"codomain_depth", phi.codomain_depth()}};
}

Json to_json(const NormReport& r) {
  return {{"sup_norm", r.sup_norm},
          {"lip_norm", r.lip_norm},
          {"value_at_root", r.value_at_root},
          {"d_sup", r.d_sup},
          {"tail_profile", profile_json(r.tail_profile)}};
}

Json to_json(const Certificate& c, const RootedTree& t) {
  Json ws = Json::array();
  for (const auto& w : c.witnesses) {
    Json wj = {{"kind", w.kind}, {"vertices", w.vertices}, {"values", w.values}, {"detail", w.detail}};
    if (t.family() == Family::ZLine) wj["labels"] = labels_json(t, w.vertices);
    ws.push_back(std::move(wj));
  }
  Json prof = Json::array();
  for (const auto& s : c.depth_profile) {
    prof.push_back({{"name", s.name}, {"depths", s.depths}, {"values", s.values}});
  }
  Json items = Json::array();
  for (const auto& it : c.items) {
    items.push_back({{"item", it.item},
                     {"criterion", it.criterion},
                     {"verdict", it.verdict ? Json(std::string(verdict_name(*it.verdict))) : Json(nullptr)},
                     {"basis", it.basis}});
  }
  Json j = {{"statement", std::string(statement_name(c.statement))},
            {"verdict", std::string(verdict_name(c.verdict))},
            {"scope", decided(c.verdict) ? "truncation" : "trend"},
            {"witnesses", std::move(ws)},
            {"depth_profile", std::move(prof)},
            {"theorem_ref", c.theorem_ref},
            {"trend_slope", c.trend_slope ? Json(*c.trend_slope) : Json(nullptr)},
            {"notes", c.notes}};
  if (!c.items.empty()) j["items"] = std::move(items);
  return j;
}

Json to_json(const OracleResult& r) {
  return {{"quantity", std::string(quantity_name(r.quantity))},
          {"method", std::string(method_name(r.method))},
          {"value", r.value},
          {"search_size", r.search_size},
          {"witness", r.witness},
          {"extremizer", r.extremizer ? function_to_json(*r.extremizer)["values"] : Json(nullptr)}};
}

Json to_json(const JBracket& r) {
  return {{"upper", r.upper},
          {"lower", r.lower},
          {"gap", r.gap},
          {"search_size", r.search_size},
          {"minimizer", function_to_json(r.minimizer)["values"]}};
}

Json to_json(const InfeasibilityReport& r, const RootedTree& t) {
  Json j = {{"verdict", std::string(feasibility_name(r.verdict))},
            {"method", std::string(method_name(r.method))},
            {"lower_bound", r.lower_bound},
            {"pair_quotient", r.pair_quotient},
            {"forced_count", r.forced_count},
            {"reason", r.reason},
            {"soundness", "infeasible is a proof; feasible comes with an explicit preimage; the "
                          "difference-quotient bound alone cannot establish feasibility"}};
  if (r.pair) {
    const auto [u, w] = *r.pair;
    j["pair"] = {{"vertices", {u, w}},
                 {"labels", labels_json(t, {u, w})},
                 {"distance", t.distance(u, w)},
                 {"quotient", r.pair_quotient}};
  } else {
    j["pair"] = nullptr;
  }
  j["interpolant"] = r.interpolant ? function_to_json(*r.interpolant)["values"] : Json(nullptr);
  return j;
}

Json to_json(const SurjectivityBracket& r, const RootedTree& t) {
  return {{"lower", r.bounds.lower},
          {"upper", r.bounds.upper},
          {"inf_weight", r.inf_weight},
          {"upper_argmin", r.upper_argmin == kNoVertex ? Json(nullptr) : vertex_json(t, r.upper_argmin)},
          {"forced_zero_reason", r.forced_zero_reason}};
}

std::string to_dot(const RootedTree& t, const SelfMap* phi) {
  static constexpr const char* kPalette[] = {"#f4a582", "#fddbc7", "#d1e5f0", "#92c5de",
                                             "#4393c3", "#b2abd2", "#fee090", "#a6d96a"};
  std::ostringstream out;
  out << "digraph tree {\n  node [style=filled];\n";
  for (VertexId v = 0; v < t.size(); ++v) {
    out << "  " << v << " [label=\"" << t.label(v) << "\", fillcolor=\"" << kPalette[t.depth(v) % 8]
        << "\"];\n";
  }
  for (const auto& [p, c] : t.edges()) out << "  " << p << " -> " << c << ";\n";
  if (phi) {
    out << "  edge [style=dashed, color=\"#b2182b\", constraint=false];\n";
    for (VertexId v : phi->domain()) out << "  " << v << " -> " << (*phi)(v) << ";\n";
  }
  out << "}\n";
  return out.str();
}

Json analyze_report(const WeightedCompOp& op, const std::vector<std::size_t>& schedule,
                    const ClassifyConfig& cfg) {
  const RootedTree& t = op.tree();
  Json certs = Json::array();
  for (const auto& c : classify_all(op, schedule, cfg)) certs.push_back(to_json(c, t));
  return {{"schema", kSchemaVersion},
          {"mode", "analyze"},
          {"tree", tree_to_json(t)},
          {"schedule", normalize_schedule(schedule, t.truncation_depth())},
          {"certificates", std::move(certs)},
          {"unweighted_equivalences", to_json(seven_equivalences(op.phi(), schedule, cfg), t)}};
}

Json norms_report(const WeightedCompOp& op) {
  const RootedTree& t = op.tree();
  const PreimageInf pi = min_preimage_sup(op);
  const Bounds lb = lip_bounds(op);
  const Bounds jb = j_lip_bracket(op);
  Json linf = {{"op_norm", linf_op_norm(op)},
               {"ess_tail", profile_json(tail_profile(op, &linf_ess_norm_tail))},
               {"j", j_linf(op)},
               {"j_argmin", pi.argmin == kNoVertex ? Json(nullptr) : vertex_json(t, pi.argmin)},
               {"k", k_linf(op)},
               {"isometry", isometry_json(isometry_check_linf(op), t)}};
  Json lip = {{"bounds", {{"lower", lb.lower}, {"upper", lb.upper}}},
              {"exact_norm", lip_exact_norm(op)},
              {"ess_tail", profile_json(tail_profile(op, &lip_ess_norm_tail))},
              {"j_bracket", {{"lower", jb.lower}, {"upper", jb.upper}}},
              {"k_bracket", to_json(k_lip_bracket(op), t)}};
  if (t.truncation_depth() >= 2) lip["isometry"] = isometry_json(isometry_check_lip(op), t);
  return {{"schema", kSchemaVersion},
          {"mode", "norms"},
          {"tree", tree_to_json(t)},
          {"psi", to_json(norms(op.psi()))},
          {"linf", std::move(linf)},
          {"lip", std::move(lip)}};
}

Json oracle_report(const WeightedCompOp& op, std::uint64_t seed) {
  const RootedTree& t = op.tree();
  Json records = Json::array();
  bool all = true;
  auto record = [&](const std::string& what, Json oracle, double formula, bool ok, double tol) {
    all = all && ok;
    records.push_back({{"quantity", what}, {"oracle", std::move(oracle)}, {"formula", formula},
                       {"agree", ok}, {"tol", tol}});
  };

  const double linf = linf_op_norm(op);
  const OracleResult lo = t.size() <= kMaxExhaustiveMaxVertices ? norm_oracle_linf(op)
                                                                : norm_oracle_linf_sampled(op, seed);
  record("linf_op_norm", to_json(lo), linf, std::abs(lo.value - linf) <= 1e-9, 1e-9);

  const double lip = lip_exact_norm(op);
  const Bounds b = lip_bounds(op);
  const OracleResult lp = norm_oracle_lip(op);
  record("lip_exact_norm", to_json(lp), lip,
         std::abs(lp.value - lip) <= 1e-9 && lp.value >= b.lower - 1e-9 && lp.value <= b.upper + 1e-9, 1e-9);

  Json notes = Json::array();
  if (op.phi().codomain().size() <= kMaxExhaustiveMinVertices) {
    const JBracket jb = j_oracle_linf_bracket(op);
    record("j_linf", to_json(jb), jb.lower, jb.upper >= jb.lower - 1e-9, 1e-9);
  } else {
    notes.push_back("injectivity-modulus search skipped: codomain ball has more than " +
                    std::to_string(kMaxExhaustiveMinVertices) + " vertices");
  }

  if (t.size() <= 64) {
    std::set<VertexId> targets;
    for (VertexId v : op.phi().domain()) targets.insert(op.phi()(v));
    PointEvalOptions opts;
    opts.seed = seed;
    for (VertexId w : targets) {
      const OracleResult pe = point_eval_lip_norm(op.psi().tree_ptr(), w, OracleMethod::PathExtremal, opts);
      const OracleResult gr = point_eval_lip_norm(op.psi().tree_ptr(), w, OracleMethod::GridRefine, opts);
      const double expect = std::max<double>(1.0, static_cast<double>(t.depth(w)));
      Json both = {{"vertex", vertex_json(t, w)}, {"path_extremal", pe.value}, {"grid_refine", gr.value}};
      record("point_eval_lip_norm", std::move(both), expect,
             std::abs(pe.value - expect) <= 1e-9 && std::abs(gr.value - pe.value) <= 1e-6, 1e-6);
    }
  } else {
    notes.push_back("point-evaluation gate skipped: more than 64 vertices");
  }
  return {{"schema", kSchemaVersion},
          {"mode", "oracle"},
          {"seed", seed},
          {"tree", tree_to_json(t)},
          {"records", std::move(records)},
          {"all_agree", all},
          {"notes", std::move(notes)}};
}

FixtureOutcome run_fixture(const Fixture& f, const ClassifyConfig& cfg) {
  FixtureOutcome out;
  const TreePtr tree = load_tree(f.tree, "/tree");
  const RootedTree& t = *tree;
  const SelfMap phi = load_map(f.phi, tree, "/phi");
  const auto schedule = default_schedule(t.truncation_depth());

  Json cases = Json::array();
  std::optional<WeightedCompOp> first_op;
  for (const auto& fc : f.cases) {
    const WeightedCompOp op(load_function(fc.psi, tree, &phi, "/psi"), phi);
    const auto certs = classify_all(op, schedule, cfg);
    Json cj = Json::array();
    for (const auto& c : certs) cj.push_back(to_json(c, t));
    Json ex = Json::array();
    for (const auto& [st, want] : fc.expected) {
      const Verdict got = find_certificate(certs, st).verdict;
      const bool ok = got == want;
      ex.push_back({{"statement", std::string(statement_name(st))},
                    {"expected", std::string(verdict_name(want))},
                    {"actual", std::string(verdict_name(got))},
                    {"ok", ok}});
      if (!ok) {
        out.failures.push_back(f.name + "/" + fc.label + ": " + std::string(statement_name(st)) +
                               " expected " + std::string(verdict_name(want)) + ", got " +
                               std::string(verdict_name(got)));
      }
    }
    cases.push_back({{"label", fc.label}, {"psi", fc.psi}, {"certificates", std::move(cj)},
                     {"expectations", std::move(ex)}});
    if (!first_op) first_op.emplace(op);
  }

  Json sweep = Json::array();
  for (std::size_t n : f.sweep_depths) {
    Json tj = f.tree;
    tj["depth"] = n;
    const TreePtr tn = load_tree(tj, "/tree");
    const SelfMap pn = load_map(f.phi, tn, "/phi");
    for (const auto& fc : f.cases) {
      const WeightedCompOp op(load_function(fc.psi, tn, &pn, "/psi"), pn);
      const IsometryVerdict iso = isometry_check_linf(op, cfg.exact_tol);
      sweep.push_back({{"depth", n},
                       {"case", fc.label},
                       {"linf_isometry", iso.isometry},
                       {"linf_tail_half", linf_ess_norm_tail(op, n / 2)},
                       {"lip_tail_half", lip_ess_norm_tail(op, n / 2)}});
      for (const auto& [st, want] : fc.expected) {
        if (st == Statement::LinfIsometry && want == Verdict::Holds && !iso.isometry) {
          out.failures.push_back(f.name + "/" + fc.label + ": not an isometry at depth " + std::to_string(n) +
                                 " (" + iso.reason + ")");
        }
      }
    }
  }

  Json report = {{"schema", kSchemaVersion},
                 {"fixture", f.name},
                 {"summary", f.summary},
                 {"tree", f.tree},
                 {"phi", f.phi},
                 {"schedule", schedule},
                 {"cases", std::move(cases)},
                 {"sweep", std::move(sweep)}};

  Json notes = Json::array();
  if (f.probe && first_op) {
    const WeightedCompOp& op = *first_op;
    const VertexFunction g = load_function(f.probe->g, tree, &phi, "/probe/g");
    const InfeasibilityReport inf = surjectivity_infeasibility(op, g);
    const SurjectivityBracket kb = k_lip_bracket(op);
    Json probe = {{"g", f.probe->g},
                  {"expected", std::string(feasibility_name(f.probe->expected))},
                  {"result", to_json(inf, t)},
                  {"k_bracket", to_json(kb, t)}};
    if (inf.verdict == Feasibility::Infeasible && inf.lower_bound > 0.0) {
      double gsup = 0.0;
      for (VertexId v : op.phi().domain()) gsup = std::max(gsup, std::abs(g.values()[v]));
      probe["k_upper_from_probe"] = gsup / inf.lower_bound;
    }
    if (inf.verdict != f.probe->expected) {
      out.failures.push_back(f.name + ": probe expected " + std::string(feasibility_name(f.probe->expected)) +
                             ", got " + std::string(feasibility_name(inf.verdict)));
    }
    report["probe"] = std::move(probe);

    if (kb.upper_argmin != kNoVertex) {
      const std::string at = std::to_string(t.label(kb.upper_argmin));
      std::string note = "computed inf |psi|(1+|phi|) = " + fmt(kb.bounds.upper) + " at n = " + at +
                         " (psi = " + fmt(op.psi()(kb.upper_argmin)) + ", |phi| = " +
                         std::to_string(op.phi().image_depth(kb.upper_argmin)) + ")";
      if (f.reference_inf_weighted_depth) {
        const double ref = *f.reference_inf_weighted_depth;
        if (std::abs(ref - kb.bounds.upper) > 1e-9) {
          note += "; the reference value " + fmt(ref) + " disagrees with direct evaluation at n = " + at +
                  ". Non-surjectivity does not depend on it: the infimum is positive either way";
        } else {
          note += ", matching the reference value";
        }
      }
      notes.push_back(note);
    }
    notes.push_back("inf |psi| over the domain is " + fmt(kb.inf_weight) +
                    " on this truncation; it shrinks as the truncation grows");
  }
  report["notes"] = std::move(notes);
  report["expectations_met"] = out.failures.empty();
  out.report = std::move(report);
  return out;
}

std::filesystem::path golden_dir() {
  if (const char* env = std::getenv("TREEWCO_GOLDEN_DIR"); env && *env) return env;
  return TREEWCO_SOURCE_GOLDEN_DIR;
}

}  // namespace treewco
