#ifndef SIMDIALOG_PERSISTENCE_HPP
#define SIMDIALOG_PERSISTENCE_HPP

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "simdialog/model.hpp"
#include "simdialog/number.hpp"
#include "simdialog/validate.hpp"

namespace simdialog {

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

namespace detail {

inline std::string xml_escape(std::string_view text, bool attribute) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += attribute ? "&quot;" : "\""; break;
      case '\n': out += attribute ? "&#10;" : "\n"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += attribute ? "&#9;" : "\t"; break;
      default: out += c;
    }
  }
  return out;
}

class XmlWriter {
 public:
  XmlWriter() { out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

  XmlWriter& open(std::string_view name) {
    close_start_tag();
    indent();
    out_ << '<' << name;
    stack_.emplace_back(name);
    tag_open_ = true;
    return *this;
  }

  XmlWriter& attr(std::string_view name, std::string_view value) {
    out_ << ' ' << name << "=\"" << xml_escape(value, true) << '"';
    return *this;
  }
  XmlWriter& attr(std::string_view name, double value) { return attr(name, format_number(value)); }

  /// Element with text content only.
  XmlWriter& text_element(std::string_view name, std::string_view text) {
    close_start_tag();
    indent();
    out_ << '<' << name << '>' << xml_escape(text, false) << "</" << name << ">\n";
    return *this;
  }

  XmlWriter& close() {
    std::string name = std::move(stack_.back());
    stack_.pop_back();
    if (tag_open_) {
      out_ << "/>\n";
      tag_open_ = false;
    } else {
      indent();
      out_ << "</" << name << ">\n";
    }
    return *this;
  }

  std::string str() const { return out_.str(); }

 private:
  void close_start_tag() {
    if (tag_open_) {
      out_ << ">\n";
      tag_open_ = false;
    }
  }
  void indent() {
    for (std::size_t i = 0; i < stack_.size(); ++i) out_ << "  ";
  }

  std::ostringstream out_;
  std::vector<std::string> stack_;
  bool tag_open_ = false;
};

inline void write_weights(XmlWriter& w, const Project& p, const std::vector<double>& player, const std::vector<double>& npc) {
  for (std::size_t i = 0; i < player.size(); ++i)
    w.open("w").attr("scope", "player").attr("state", p.player_states.at(i).name).attr("value", player[i]).close();
  for (std::size_t i = 0; i < npc.size(); ++i)
    w.open("w").attr("scope", "npc").attr("state", p.npc_states.at(i).name).attr("value", npc[i]).close();
}

inline void write_cause(XmlWriter& w, const Project& p, const CauseWeights& c) {
  w.open("cause").attr("general", c.general);
  write_weights(w, p, c.player, c.npc);
  w.close();
}

inline void write_effect(XmlWriter& w, const Project& p, const EffectWeights& e) {
  w.open("effect");
  write_weights(w, p, e.player, e.npc);
  w.close();
}

inline void write_node(XmlWriter& w, const Project& p, const DialogNode& node) {
  w.open("node").attr("id", node.id).attr("type", to_string(node.kind()));
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, StartNode>) {
          w.attr("name", body.name);
          write_effect(w, p, body.effect);
        } else if constexpr (std::is_same_v<T, DialogItem>) {
          w.attr("actor", body.actor);
          if (body.conversant) w.attr("conversant", *body.conversant);
          if (body.cue) w.text_element("cue", *body.cue);
          if (body.direction) w.text_element("direction", *body.direction);
          if (body.menu_label) w.text_element("label", *body.menu_label);
          if (body.cause) write_cause(w, p, *body.cause);
          write_effect(w, p, body.effect);
          for (const auto& a : body.assets) w.open("asset").attr("role", to_string(a.role)).attr("path", a.path).close();
        } else if constexpr (std::is_same_v<T, TerminationNode>) {
          if (body.termination_value) w.attr("value", *body.termination_value);
          w.text_element("direction", body.direction);
          if (body.cause) write_cause(w, p, *body.cause);
        } else {
          w.attr("target", body.target_start);
        }
      },
      node.body);
  w.close();
}

}  // namespace detail

/// Canonical XML text of a project. Same project, same bytes.
inline std::string to_xml(const Project& p) {
  detail::XmlWriter w;
  w.open("simdialog").attr("version", std::to_string(kFormatVersion));
  w.open("metadata").attr("title", p.metadata.title).attr("version", p.metadata.version).close();

  w.open("actors");
  for (const auto& [id, a] : p.actors) {
    w.open("actor").attr("id", a.id).attr("name", a.display_name).attr("kind", to_string(a.kind));
    if (!a.color.empty()) w.attr("color", a.color);
    for (const auto& [k, v] : a.attributes) w.open("attribute").attr("key", k).attr("value", v).close();
    w.close();
  }
  w.close();

  for (Scope scope : {Scope::Player, Scope::Npc}) {
    w.open("states").attr("scope", to_string(scope));
    for (const auto& d : p.states(scope)) w.open("state").attr("name", d.name).attr("default", d.default_value).close();
    w.close();
  }

  w.open("pages");
  for (const auto& [name, page] : p.pages) {
    w.open("page").attr("name", page.name);
    for (const auto& id : page.node_ids)
      if (const DialogNode* n = p.find_node(id)) detail::write_node(w, p, *n);
    if (!page.layout.empty()) {
      w.open("layout");
      for (const auto& [id, pos] : page.layout) w.open("position").attr("node", id).attr("x", pos.x).attr("y", pos.y).close();
      w.close();
    }
    w.close();
  }
  w.close();

  w.open("edges");
  for (const auto& e : p.sorted_edges()) {
    w.open("edge").attr("from", e.from).attr("to", e.to).attr("order", std::to_string(e.order));
    if (e.branch) w.attr("branch", *e.branch);
    w.close();
  }
  w.close();

  w.close();
  return w.str();
}

/// Writes the project. Projects with Error diagnostics are refused.
inline void save(const Project& project, const std::filesystem::path& path) {
  const auto diags = validate(project);
  if (has_errors(diags)) {
    std::string first;
    for (const auto& d : diags)
      if (d.severity == Severity::Error) {
        first = format(d);
        break;
      }
    throw Error(ErrorCode::RefusedInvalid, std::to_string(count(diags, Severity::Error)) + " validation error(s), first: " + first);
  }
  const std::string text = to_xml(project);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

namespace detail {

using boost::property_tree::ptree;

inline Error schema_error(std::string_view element, const std::string& message) {
  return Error(ErrorCode::SchemaError, "<" + std::string(element) + ">: " + message);
}

class XmlReader {
 public:
  Project read(const ptree& doc) {
    auto root_it = doc.find("simdialog");
    if (root_it == doc.not_found()) throw schema_error("simdialog", "root element missing");
    const ptree& root = root_it->second;
    const std::string version = required(root, "simdialog", "version");
    auto v = parse_number(version);
    if (!v || *v != static_cast<int>(*v)) throw schema_error("simdialog", "version '" + version + "' is not an integer");
    if (static_cast<int>(*v) != kFormatVersion)
      throw Error(ErrorCode::UnsupportedVersion, "format version " + version + " is not supported (expected " +
                                                     std::to_string(kFormatVersion) + ")");

    for (const auto& [name, child] : root) {
      if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
      if (name == "metadata") metadata(child);
      else if (name == "actors") actors(child);
      else if (name == "states") states(child);
      else if (name == "pages") continue;  // after states, below
      else if (name == "edges") continue;
      else throw schema_error(name, "unexpected element inside <simdialog>");
    }
    for (const auto& [name, child] : root)
      if (name == "pages") pages(child);
    for (const auto& [name, child] : root)
      if (name == "edges") edges(child);
    return std::move(p_);
  }

 private:
  static std::optional<std::string> attribute(const ptree& node, std::string_view name) {
    if (auto attrs = node.get_child_optional("<xmlattr>"))
      if (auto v = attrs->get_optional<std::string>(ptree::path_type(std::string(name), '\0'))) return *v;
    return std::nullopt;
  }

  static std::string required(const ptree& node, std::string_view element, std::string_view name) {
    auto v = attribute(node, name);
    if (!v) throw schema_error(element, "missing attribute '" + std::string(name) + "'");
    return *v;
  }

  static double number(const ptree& node, std::string_view element, std::string_view name) {
    const auto text = required(node, element, name);
    auto v = parse_number(text);
    if (!v) throw schema_error(element, "attribute '" + std::string(name) + "' is not a number: '" + text + "'");
    return *v;
  }

  static double unit(const ptree& node, std::string_view element, std::string_view name) {
    double v = number(node, element, name);
    if (!in_unit_range(v))
      throw schema_error(element, "attribute '" + std::string(name) + "' = " + format_number(v) + " is outside [-1, 1]");
    return v;
  }

  static void expect_children(const ptree& node, std::string_view element, std::initializer_list<std::string_view> allowed) {
    for (const auto& [name, child] : node) {
      if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
        throw schema_error(name, "unexpected element inside <" + std::string(element) + ">");
    }
  }

  void metadata(const ptree& node) {
    p_.metadata.title = attribute(node, "title").value_or("");
    p_.metadata.version = attribute(node, "version").value_or("");
  }

  void actors(const ptree& node) {
    expect_children(node, "actors", {"actor"});
    for (const auto& [name, a] : node) {
      if (name != "actor") continue;
      expect_children(a, "actor", {"attribute"});
      Actor actor;
      actor.id = required(a, "actor", "id");
      actor.display_name = attribute(a, "name").value_or(actor.id);
      const auto kind = required(a, "actor", "kind");
      if (kind == "player") actor.kind = Scope::Player;
      else if (kind == "npc") actor.kind = Scope::Npc;
      else throw schema_error("actor", "kind must be 'player' or 'npc', got '" + kind + "'");
      actor.color = attribute(a, "color").value_or("");
      for (const auto& [cn, attr] : a)
        if (cn == "attribute") actor.attributes[required(attr, "attribute", "key")] = attribute(attr, "value").value_or("");
      if (!p_.actors.emplace(actor.id, actor).second) throw schema_error("actor", "duplicate actor id '" + actor.id + "'");
    }
  }

  void states(const ptree& node) {
    expect_children(node, "states", {"state"});
    const auto scope = required(node, "states", "scope");
    std::vector<StateDeclaration>* decls = nullptr;
    if (scope == "player") decls = &p_.player_states;
    else if (scope == "npc") decls = &p_.npc_states;
    else throw schema_error("states", "scope must be 'player' or 'npc', got '" + scope + "'");
    if (!decls->empty()) throw schema_error("states", "scope '" + scope + "' declared twice");
    for (const auto& [name, s] : node) {
      if (name != "state") continue;
      StateDeclaration d{required(s, "state", "name"), unit(s, "state", "default")};
      for (const auto& existing : *decls)
        if (existing.name == d.name) throw schema_error("state", "duplicate " + scope + " state '" + d.name + "'");
      decls->push_back(std::move(d));
    }
  }

  void weights(const ptree& node, std::string_view element, std::vector<double>& player, std::vector<double>& npc) {
    player.assign(p_.player_states.size(), 0.0);
    npc.assign(p_.npc_states.size(), 0.0);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [name, w] : node) {
      if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
      if (name != "w") throw schema_error(name, "unexpected element inside <" + std::string(element) + ">");
      const auto scope = required(w, "w", "scope");
      const auto state = required(w, "w", "state");
      const double value = unit(w, "w", "value");
      const std::vector<StateDeclaration>* decls = scope == "player" ? &p_.player_states
                                                   : scope == "npc"  ? &p_.npc_states
                                                                     : nullptr;
      if (decls == nullptr) throw schema_error("w", "scope must be 'player' or 'npc', got '" + scope + "'");
      if (!seen.emplace(scope, state).second) throw schema_error("w", "duplicate weight for " + scope + " state '" + state + "'");
      auto& vec = scope == "player" ? player : npc;
      bool found = false;
      for (std::size_t i = 0; i < decls->size(); ++i)
        if ((*decls)[i].name == state) {
          vec[i] = value;
          found = true;
        }
      if (!found) throw schema_error("w", "undeclared " + scope + " state '" + state + "'");
    }
  }

  CauseWeights cause(const ptree& node) {
    CauseWeights c;
    c.general = unit(node, "cause", "general");
    weights(node, "cause", c.player, c.npc);
    return c;
  }

  EffectWeights effect(const ptree& node) {
    EffectWeights e;
    weights(node, "effect", e.player, e.npc);
    return e;
  }

  static std::optional<std::string> text_child(const ptree& node, std::string_view name) {
    std::optional<std::string> out;
    for (const auto& [cn, child] : node) {
      if (cn != name) continue;
      if (out) throw schema_error(name, "element appears twice");
      if (child.size() > 0 && !(child.size() == 1 && child.begin()->first == "<xmlattr>"))
        throw schema_error(name, "expected text content only");
      out = child.data();
    }
    return out;
  }

  EffectWeights effect_child(const ptree& node) {
    for (const auto& [cn, child] : node)
      if (cn == "effect") return effect(child);
    return EffectWeights::zero(p_.player_states.size(), p_.npc_states.size());
  }

  std::optional<CauseWeights> cause_child(const ptree& node) {
    for (const auto& [cn, child] : node)
      if (cn == "cause") return cause(child);
    return std::nullopt;
  }

  DialogNode node(const ptree& n) {
    DialogNode out;
    out.id = required(n, "node", "id");
    const auto type = required(n, "node", "type");
    if (type == "start") {
      expect_children(n, "node", {"effect"});
      out.body = StartNode{required(n, "node", "name"), effect_child(n)};
    } else if (type == "item") {
      expect_children(n, "node", {"cue", "direction", "label", "cause", "effect", "asset"});
      DialogItem item;
      item.actor = required(n, "node", "actor");
      item.conversant = attribute(n, "conversant");
      item.cue = text_child(n, "cue");
      item.direction = text_child(n, "direction");
      item.menu_label = text_child(n, "label");
      item.cause = cause_child(n);
      item.effect = effect_child(n);
      for (const auto& [cn, child] : n) {
        if (cn != "asset") continue;
        const auto role_text = required(child, "asset", "role");
        auto role = parse_asset_role(role_text);
        if (!role) throw schema_error("asset", "unknown role '" + role_text + "'");
        item.assets.push_back({*role, required(child, "asset", "path")});
      }
      out.body = std::move(item);
    } else if (type == "termination") {
      expect_children(n, "node", {"direction", "cause"});
      out.body = TerminationNode{text_child(n, "direction").value_or(""), attribute(n, "value"), cause_child(n)};
    } else if (type == "reference") {
      expect_children(n, "node", {});
      out.body = ReferenceNode{required(n, "node", "target")};
    } else if (type == "subdialog") {
      expect_children(n, "node", {});
      out.body = SubdialogNode{required(n, "node", "target")};
    } else {
      throw schema_error("node", "unknown node type '" + type + "'");
    }
    return out;
  }

  void pages(const ptree& node) {
    expect_children(node, "pages", {"page"});
    for (const auto& [name, pg] : node) {
      if (name != "page") continue;
      expect_children(pg, "page", {"node", "layout"});
      Page page;
      page.name = required(pg, "page", "name");
      if (p_.pages.contains(page.name)) throw schema_error("page", "duplicate page name '" + page.name + "'");
      for (const auto& [cn, child] : pg) {
        if (cn == "node") {
          DialogNode n = node_checked(child);
          page.node_ids.insert(n.id);
          p_.nodes.emplace(n.id, std::move(n));
        } else if (cn == "layout") {
          expect_children(child, "layout", {"position"});
          for (const auto& [pn, pos] : child) {
            if (pn != "position") continue;
            const auto id = required(pos, "position", "node");
            page.layout[id] = Position{number(pos, "position", "x"), number(pos, "position", "y")};
          }
        }
      }
      p_.pages.emplace(page.name, std::move(page));
    }
  }

  DialogNode node_checked(const ptree& child) {
    DialogNode n = node(child);
    if (p_.nodes.contains(n.id)) throw schema_error("node", "duplicate node id '" + n.id + "'");
    return n;
  }

  void edges(const ptree& node) {
    expect_children(node, "edges", {"edge"});
    for (const auto& [name, e] : node) {
      if (name != "edge") continue;
      const auto order_text = required(e, "edge", "order");
      auto order = parse_number(order_text);
      if (!order || *order != static_cast<int>(*order)) throw schema_error("edge", "order '" + order_text + "' is not an integer");
      p_.edges.push_back({required(e, "edge", "from"), required(e, "edge", "to"), static_cast<int>(*order), attribute(e, "branch")});
    }
  }

  Project p_;
};

}  // namespace detail

/// Parses project XML. Malformed XML raises ParseError with the line; a
/// well-formed document that breaks the format raises SchemaError naming the
/// element; other versions raise UnsupportedVersion. Out-of-range weights are
/// rejected, never clamped.
inline Project from_xml(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  std::istringstream in(text);
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  return detail::XmlReader{}.read(doc);
}

inline Project load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_xml(buf.str());
}

// ---------------------------------------------------------------------------
// Asset inventory
// ---------------------------------------------------------------------------

struct InventoryEntry {
  std::string path;
  AssetRole role = AssetRole::Other;
  std::vector<NodeId> referencing_nodes;  // sorted, unique
  std::optional<bool> exists_on_disk;     // unset when no asset root was given

  bool operator==(const InventoryEntry&) const = default;
};

struct InventoryReport {
  std::vector<InventoryEntry> entries;  // sorted by (path, role)

  std::size_t total() const noexcept { return entries.size(); }
  std::size_t count(AssetRole role) const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const auto& e) { return e.role == role; }));
  }
  std::size_t missing() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.exists_on_disk == false; }));
  }
};

/// Lists every asset referenced by dialog items, one entry per (path, role).
/// Relative paths are checked under `asset_root` when one is given.
inline InventoryReport inventory(const Project& project, const std::optional<std::filesystem::path>& asset_root = std::nullopt) {
  std::map<std::pair<std::string, AssetRole>, std::set<NodeId>> refs;
  for (const auto& [id, node] : project.nodes)
    if (const auto* item = std::get_if<DialogItem>(&node.body))
      for (const auto& a : item->assets) refs[{a.path, a.role}].insert(id);

  InventoryReport report;
  for (const auto& [key, nodes] : refs) {
    InventoryEntry e{key.first, key.second, {nodes.begin(), nodes.end()}, std::nullopt};
    if (asset_root) {
      std::filesystem::path p(key.first);
      if (p.is_relative()) p = *asset_root / p;
      std::error_code ec;
      e.exists_on_disk = std::filesystem::exists(p, ec) && !ec;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

/// One line per asset: path, role, reference count, exists (true/false/unknown).
inline std::string format_inventory_machine(const InventoryReport& report) {
  std::string out;
  for (const auto& e : report.entries) {
    out += e.path + '\t' + std::string(to_string(e.role)) + '\t' + std::to_string(e.referencing_nodes.size()) + '\t';
    out += e.exists_on_disk ? (*e.exists_on_disk ? "true" : "false") : "unknown";
    out += '\n';
  }
  return out;
}

inline std::string format_inventory_table(const InventoryReport& report) {
  std::size_t wpath = 4;
  for (const auto& e : report.entries) wpath = std::max(wpath, e.path.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::ostringstream out;
  out << pad("PATH", wpath) << "  " << pad("ROLE", 7) << "  " << pad("REFS", 4) << "  EXISTS  NODES\n";
  for (const auto& e : report.entries) {
    std::string nodes;
    for (const auto& n : e.referencing_nodes) nodes += (nodes.empty() ? "" : ",") + n;
    out << pad(e.path, wpath) << "  " << pad(std::string(to_string(e.role)), 7) << "  "
        << pad(std::to_string(e.referencing_nodes.size()), 4) << "  "
        << pad(e.exists_on_disk ? (*e.exists_on_disk ? "yes" : "MISSING") : "-", 6) << "  " << nodes << '\n';
  }
  out << report.total() << " asset(s): " << report.count(AssetRole::Audio) << " audio, " << report.count(AssetRole::LipSync)
      << " lipsync, " << report.count(AssetRole::Other) << " other";
  if (report.missing() > 0) out << "; " << report.missing() << " missing";
  out << '\n';
  return out.str();
}

}  // namespace simdialog

#endif  // SIMDIALOG_PERSISTENCE_HPP
