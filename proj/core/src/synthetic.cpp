#include "vsg/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "vsg/error.hpp"
#include "vsg/scene_graph_io.hpp"

namespace vsg {
namespace {

using Json = nlohmann::ordered_json;

struct Slot {
  bool surface = false;
  std::size_t index = 0;
};

struct LiveObject {
  ObjectId id;
  std::size_t spec_index = 0;
  std::size_t class_index = 0;
  std::vector<std::size_t> attributes;  // non-state, sorted
  std::optional<std::size_t> state;     // index into the class' state list
  Slot slot;
  std::optional<ObjectId> support;
  Vec3 position = Vec3::Zero();
};

double horizontal_distance(const Vec3& a, const Vec3& b) { return (a - b).head<2>().norm(); }

class RoomState {
 public:
  RoomState(const GeneratorSpec& spec, nn::Rng& rng) : spec_(spec), rng_(rng) {
    for (double x = spec.floor_spacing / 2; x < spec.room_width; x += spec.floor_spacing) {
      for (double y = spec.floor_spacing / 2; y < spec.room_depth; y += spec.floor_spacing) {
        floor_.emplace_back(x, y, 0.0);
      }
    }
    floor_used_.assign(floor_.size(), false);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  ObjectId fresh_id() {
    std::uniform_int_distribution<std::uint64_t> dist(1, 999'999);
    for (;;) {
      const std::uint64_t v = dist(rng_);
      if (used_ids_.insert(v).second) return ObjectId{v};
    }
  }

  std::vector<std::size_t> free_floor(const Vec3* away_from, bool clear_of_supports) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < floor_.size(); ++i) {
      if (floor_used_[i]) continue;
      if (away_from && horizontal_distance(floor_[i], *away_from) < spec_.min_move_distance) {
        continue;
      }
      if (clear_of_supports && !clear(floor_[i])) continue;
      out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> free_surface(const Vec3* away_from) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < surface_.size(); ++i) {
      if (surface_used_[i]) continue;
      if (away_from && (surface_[i].second - *away_from).norm() < spec_.min_move_distance) continue;
      out.push_back(i);
    }
    return out;
  }

  void add_support_surface(ObjectId owner, const Vec3& base) {
    const double step = 2.0 * spec_.surface_offset;
    const double x0 = -step * static_cast<double>(spec_.surface_grid_x - 1) / 2.0;
    const double y0 = -step * static_cast<double>(spec_.surface_grid_y - 1) / 2.0;
    for (std::size_t ix = 0; ix < spec_.surface_grid_x; ++ix) {
      for (std::size_t iy = 0; iy < spec_.surface_grid_y; ++iy) {
        const double dx = x0 + step * static_cast<double>(ix);
        const double dy = y0 + step * static_cast<double>(iy);
        surface_.emplace_back(owner, Vec3(base.x() + dx, base.y() + dy, spec_.surface_height));
        surface_used_.push_back(false);
      }
    }
    support_positions_.push_back(base);
  }

  void occupy(const Slot& s) { (s.surface ? surface_used_ : floor_used_)[s.index] = true; }
  void release(const Slot& s) { (s.surface ? surface_used_ : floor_used_)[s.index] = false; }

  Vec3 base(const Slot& s, double height) const {
    if (s.surface) return surface_[s.index].second;
    Vec3 p = floor_[s.index];
    p.z() = height;
    return p;
  }
  ObjectId surface_owner(std::size_t index) const { return surface_[index].first; }

  Vec3 jittered(const Vec3& base) {
    const double j = spec_.position_jitter;
    if (j == 0.0) return base;
    std::uniform_real_distribution<double> d(-j, j);
    const double dx = d(rng_);
    const double dy = d(rng_);
    const double dz = d(rng_);
    return base + Vec3(dx, dy, dz);
  }

 private:
  bool clear(const Vec3& p) const {
    return std::all_of(support_positions_.begin(), support_positions_.end(), [&](const Vec3& s) {
      return horizontal_distance(p, s) >= spec_.support_clearance;
    });
  }

  const GeneratorSpec& spec_;
  nn::Rng& rng_;
  std::vector<Vec3> floor_;
  std::vector<bool> floor_used_;
  std::vector<std::pair<ObjectId, Vec3>> surface_;
  std::vector<bool> surface_used_;
  std::vector<Vec3> support_positions_;
  std::set<std::uint64_t> used_ids_;
};

std::vector<std::size_t> state_indices(const LiveObject& o, const GeneratorSpec& spec) {
  if (!o.state) return {};
  return {spec.taxonomy.attribute_index(spec.classes[o.spec_index].states[*o.state])};
}

ObjectSnapshot snapshot(const LiveObject& o, const GeneratorSpec& spec) {
  return {o.id, o.position, state_indices(o, spec)};
}

class SequenceBuilder {
 public:
  SequenceBuilder(const GeneratorSpec& spec, std::string environment_id, nn::Rng& rng)
      : spec_(spec), env_(std::move(environment_id)), room_(spec, rng) {
    has_supports_ = std::any_of(spec.classes.begin(), spec.classes.end(), [](const auto& c) {
      return c.role == ObjectRole::kSupport && c.max_count > 0;
    });
  }

  SyntheticSequence run() {
    place_initial();
    SyntheticSequence out;
    for (const auto& o : objects_) out.log.initial.push_back(snapshot(o, spec_));
    std::sort(out.log.initial.begin(), out.log.initial.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    out.scans.push_back(build_scan(0));
    for (std::size_t k = 1; k < spec_.num_scans; ++k) {
      out.log.transitions.push_back(step(k - 1, k));
      out.scans.push_back(build_scan(k));
    }
    return out;
  }

 private:
  LiveObject make_object(std::size_t spec_index) {
    const auto& cls = spec_.classes[spec_index];
    LiveObject o;
    o.id = room_.fresh_id();
    o.spec_index = spec_index;
    o.class_index = spec_.taxonomy.class_index(cls.class_name);
    for (const auto& a : cls.attributes) o.attributes.push_back(spec_.taxonomy.attribute_index(a));
    std::sort(o.attributes.begin(), o.attributes.end());
    o.attributes.erase(std::unique(o.attributes.begin(), o.attributes.end()), o.attributes.end());
    if (!cls.states.empty()) o.state = room_.pick(cls.states.size());
    return o;
  }

  void settle(LiveObject& o, Slot slot) {
    room_.occupy(slot);
    o.slot = slot;
    o.support.reset();
    if (slot.surface) o.support = room_.surface_owner(slot.index);
    o.position = room_.jittered(room_.base(slot, spec_.classes[o.spec_index].height));
  }

  std::size_t choose(const std::vector<std::size_t>& candidates, const std::string& what) {
    if (candidates.empty()) {
      throw GeneratorError("environment '" + env_ + "': no free placement for " + what);
    }
    return candidates[room_.pick(candidates.size())];
  }

  std::size_t sample_count(const ClassPropensity& cls) {
    return cls.min_count + room_.pick(cls.max_count - cls.min_count + 1);
  }

  void place_initial() {
    for (ObjectRole role : {ObjectRole::kSupport, ObjectRole::kFurniture, ObjectRole::kHandheld}) {
      for (std::size_t c = 0; c < spec_.classes.size(); ++c) {
        const auto& cls = spec_.classes[c];
        if (cls.role != role) continue;
        const auto count = sample_count(cls);
        for (std::size_t k = 0; k < count; ++k) {
          LiveObject o = make_object(c);
          if (role == ObjectRole::kHandheld) {
            place_handheld(o);
          } else {
            settle(o, {false, choose(room_.free_floor(nullptr, false), cls.class_name)});
          }
          objects_.push_back(std::move(o));
          if (role == ObjectRole::kSupport) {
            room_.add_support_surface(objects_.back().id,
                                      room_.base(objects_.back().slot, cls.height));
          }
        }
      }
    }
    spawn_clutter(nullptr);
  }

  void place_handheld(LiveObject& o) {
    const auto& cls = spec_.classes[o.spec_index];
    if (room_.uniform() < cls.support_fraction) {
      const auto surfaces = room_.free_surface(nullptr);
      if (!surfaces.empty()) {
        settle(o, {true, surfaces[room_.pick(surfaces.size())]});
        return;
      }
    }
    settle(o, {false, choose(room_.free_floor(nullptr, true), cls.class_name)});
  }

  void spawn_clutter(Transition* transition) {
    for (std::size_t c = 0; c < spec_.classes.size(); ++c) {
      const auto& cls = spec_.classes[c];
      if (cls.role != ObjectRole::kClutter) continue;
      const auto count = sample_count(cls);
      for (std::size_t k = 0; k < count; ++k) {
        LiveObject o = make_object(c);
        const auto surfaces = room_.free_surface(nullptr);
        if (room_.uniform() < cls.support_fraction && !surfaces.empty()) {
          settle(o, {true, surfaces[room_.pick(surfaces.size())]});
        } else {
          settle(o, {false, choose(room_.free_floor(nullptr, false), cls.class_name)});
        }
        if (transition) {
          ChangeEvent e;
          e.type = ChangeEvent::Type::kAdded;
          e.id = o.id;
          e.to = o.position;
          e.state_to = state_indices(o, spec_);
          added_.push_back(std::move(e));
        }
        objects_.push_back(std::move(o));
      }
    }
  }

  // Relocates `o` when a destination is available; returns whether it moved.
  bool relocate(LiveObject& o) {
    const auto& cls = spec_.classes[o.spec_index];
    const Vec3 here = room_.base(o.slot, cls.height);
    std::vector<std::size_t> candidates;
    if (o.slot.surface) {
      candidates = room_.free_surface(&here);
    } else {
      candidates = room_.free_floor(&here, cls.role == ObjectRole::kHandheld);
    }
    if (candidates.empty()) return false;
    const Slot target{o.slot.surface, candidates[room_.pick(candidates.size())]};
    room_.release(o.slot);
    room_.occupy(target);
    o.slot = target;
    if (target.surface) o.support = room_.surface_owner(target.index);
    return true;
  }

  Transition step(std::size_t from, std::size_t to) {
    Transition t{from, to, {}};
    added_.clear();
    std::vector<std::size_t> order(objects_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return objects_[a].id < objects_[b].id; });

    std::vector<bool> removed(objects_.size(), false);
    std::vector<std::vector<std::size_t>> states_before(objects_.size());
    for (auto row : order) {
      auto& o = objects_[row];
      const auto& cls = spec_.classes[o.spec_index];
      states_before[row] = state_indices(o, spec_);
      if (room_.uniform() < cls.remove_probability) {
        removed[row] = true;
        room_.release(o.slot);
        continue;
      }
      const double move_p = (cls.role == ObjectRole::kHandheld && !o.slot.surface)
                                ? cls.unsupported_move_probability
                                : (cls.role == ObjectRole::kSupport ? 0.0 : cls.move_probability);
      if (room_.uniform() < move_p) relocate(o);
      if (cls.states.size() >= 2 && room_.uniform() < cls.toggle_probability) {
        const auto shift = 1 + room_.pick(cls.states.size() - 1);
        o.state = (*o.state + shift) % cls.states.size();
      }
    }

    const std::size_t survivors_end = objects_.size();
    spawn_clutter(&t);

    for (auto row : order) {
      auto& o = objects_[row];
      if (removed[row]) {
        ChangeEvent e;
        e.type = ChangeEvent::Type::kRemoved;
        e.id = o.id;
        t.events.push_back(std::move(e));
        continue;
      }
      const Vec3 before = o.position;
      o.position = room_.jittered(room_.base(o.slot, spec_.classes[o.spec_index].height));
      if (o.position != before) {
        ChangeEvent e;
        e.type = ChangeEvent::Type::kMoved;
        e.id = o.id;
        e.from = before;
        e.to = o.position;
        t.events.push_back(std::move(e));
      }
      auto after = state_indices(o, spec_);
      if (after != states_before[row]) {
        ChangeEvent e;
        e.type = ChangeEvent::Type::kStateChanged;
        e.id = o.id;
        e.state_from = states_before[row];
        e.state_to = std::move(after);
        t.events.push_back(std::move(e));
      }
    }
    std::move(added_.begin(), added_.end(), std::back_inserter(t.events));

    std::vector<LiveObject> kept;
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      if (i < survivors_end && removed[i]) continue;
      kept.push_back(std::move(objects_[i]));
    }
    objects_ = std::move(kept);
    return t;
  }

  SceneGraph build_scan(std::size_t k) const {
    std::vector<ObjectNode> nodes;
    std::vector<SemanticEdge> edges;
    const auto relation = has_supports_ ? spec_.taxonomy.relationship_index(spec_.support_relation)
                                        : std::size_t{0};
    for (const auto& o : objects_) {
      ObjectNode n;
      n.id = o.id;
      n.class_index = o.class_index;
      n.attribute_indices = o.attributes;
      for (auto s : state_indices(o, spec_)) n.attribute_indices.push_back(s);
      std::sort(n.attribute_indices.begin(), n.attribute_indices.end());
      n.position = o.position;
      nodes.push_back(std::move(n));
      if (o.support) edges.push_back({o.id, *o.support, relation});
    }
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
      return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    SceneGraph::Header header{env_, env_ + "_s" + std::to_string(k), static_cast<std::int64_t>(k),
                              spec_.taxonomy.name()};
    return SceneGraph(std::move(header), std::move(nodes), std::move(edges), spec_.taxonomy);
  }

  const GeneratorSpec& spec_;
  std::string env_;
  RoomState room_;
  std::vector<LiveObject> objects_;
  std::vector<ChangeEvent> added_;
  bool has_supports_ = false;
};

void validate(const GeneratorSpec& spec) {
  auto fail = [](const std::string& m) { throw GeneratorError(m); };
  if (spec.num_scans < 1) fail("num_scans must be >= 1");
  if (spec.surface_grid_x < 1 || spec.surface_grid_y < 1) fail("surface grid must be at least 1x1");
  if (!(spec.floor_spacing > 0) || !(spec.room_width > 0) || !(spec.room_depth > 0)) {
    fail("room extent and floor_spacing must be > 0");
  }
  if (spec.position_jitter < 0 || spec.min_move_distance < 0 || spec.support_clearance < 0) {
    fail("position_jitter, min_move_distance and support_clearance must be >= 0");
  }
  auto prob = [&](double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) fail(what + " must lie in [0, 1]");
  };
  for (const auto& c : spec.classes) {
    const auto where = "class '" + c.class_name + "': ";
    if (!spec.taxonomy.find_class(c.class_name)) fail(where + "not in the taxonomy");
    if (c.min_count > c.max_count) fail(where + "min_count > max_count");
    prob(c.support_fraction, where + "support_fraction");
    prob(c.move_probability, where + "move_probability");
    prob(c.unsupported_move_probability, where + "unsupported_move_probability");
    prob(c.toggle_probability, where + "toggle_probability");
    prob(c.remove_probability, where + "remove_probability");
    if (c.role == ObjectRole::kSupport && (c.move_probability > 0 || c.remove_probability > 0)) {
      fail(where + "support objects must be static");
    }
    for (const auto& s : c.states) {
      if (!spec.taxonomy.is_state_attribute(spec.taxonomy.attribute_index(s))) {
        fail(where + "'" + s + "' is not a state attribute");
      }
    }
    for (const auto& a : c.attributes) {
      if (spec.taxonomy.is_state_attribute(spec.taxonomy.attribute_index(a))) {
        fail(where + "state attribute '" + a + "' must be listed under states");
      }
    }
  }
  const bool supports = std::any_of(spec.classes.begin(), spec.classes.end(), [](const auto& c) {
    return c.role == ObjectRole::kSupport && c.max_count > 0;
  });
  if (supports) spec.taxonomy.relationship_index(spec.support_relation);
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json names_json(const std::vector<std::size_t>& indices, const Taxonomy& tax) {
  Json out = Json::array();
  for (auto i : indices) out.push_back(tax.attributes()[i].name);
  return out;
}

}  // namespace

std::string to_string(ObjectRole role) {
  switch (role) {
    case ObjectRole::kSupport:
      return "support";
    case ObjectRole::kFurniture:
      return "furniture";
    case ObjectRole::kHandheld:
      return "handheld";
    case ObjectRole::kClutter:
      return "clutter";
  }
  return "furniture";
}

ObjectRole object_role_from_string(const std::string& text) {
  if (text == "support") return ObjectRole::kSupport;
  if (text == "furniture") return ObjectRole::kFurniture;
  if (text == "handheld") return ObjectRole::kHandheld;
  if (text == "clutter") return ObjectRole::kClutter;
  throw ParseError("unknown object role '" + text +
                   "' (expected support|furniture|handheld|clutter)");
}

std::string to_string(ChangeEvent::Type type) {
  switch (type) {
    case ChangeEvent::Type::kMoved:
      return "moved";
    case ChangeEvent::Type::kStateChanged:
      return "state_changed";
    case ChangeEvent::Type::kRemoved:
      return "removed";
    case ChangeEvent::Type::kAdded:
      return "added";
  }
  return "moved";
}

GeneratorSpec parse_generator_spec(std::string_view text, std::string_view origin) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(origin) + ": " + e.what());
  }
  try {
    GeneratorSpec spec(taxonomy_from_json_string(j.at("taxonomy").dump()));
    spec.room_width = j.value("room_width", spec.room_width);
    spec.room_depth = j.value("room_depth", spec.room_depth);
    spec.floor_spacing = j.value("floor_spacing", spec.floor_spacing);
    spec.surface_height = j.value("surface_height", spec.surface_height);
    spec.surface_offset = j.value("surface_offset", spec.surface_offset);
    spec.surface_grid_x = j.value("surface_grid_x", spec.surface_grid_x);
    spec.surface_grid_y = j.value("surface_grid_y", spec.surface_grid_y);
    spec.support_clearance = j.value("support_clearance", spec.support_clearance);
    spec.min_move_distance = j.value("min_move_distance", spec.min_move_distance);
    spec.position_jitter = j.value("position_jitter", spec.position_jitter);
    spec.support_relation = j.value("support_relation", spec.support_relation);
    spec.num_scans = j.value("num_scans", spec.num_scans);
    spec.num_environments = j.value("num_environments", spec.num_environments);
    if (auto it = j.find("split_fractions"); it != j.end()) {
      spec.split_fractions.train = it->at("train").get<double>();
      spec.split_fractions.val = it->at("val").get<double>();
      spec.split_fractions.test = it->at("test").get<double>();
    }
    for (const auto& jc : j.at("classes")) {
      ClassPropensity c;
      c.class_name = jc.at("class").get<std::string>();
      c.role = object_role_from_string(jc.at("role").get<std::string>());
      const auto count = jc.at("count").get<std::vector<std::size_t>>();
      if (count.size() != 2) throw ParseError(std::string(origin) + ": count must be [min, max]");
      c.min_count = count[0];
      c.max_count = count[1];
      c.height = jc.value("height", c.height);
      c.support_fraction = jc.value("support_fraction", c.support_fraction);
      c.move_probability = jc.value("move_probability", c.move_probability);
      c.unsupported_move_probability =
          jc.value("unsupported_move_probability", c.unsupported_move_probability);
      c.states = jc.value("states", c.states);
      c.toggle_probability = jc.value("toggle_probability", c.toggle_probability);
      c.remove_probability = jc.value("remove_probability", c.remove_probability);
      c.attributes = jc.value("attributes", c.attributes);
      spec.classes.push_back(std::move(c));
    }
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(origin) + ": " + e.what());
  }
}

GeneratorSpec load_generator_spec(const std::filesystem::path& path) {
  return parse_generator_spec(read_text_file(path), path.string());
}

std::string format_generator_spec(const GeneratorSpec& spec) {
  Json classes = Json::array();
  for (const auto& c : spec.classes) {
    classes.push_back({{"class", c.class_name},
                       {"role", to_string(c.role)},
                       {"count", {c.min_count, c.max_count}},
                       {"height", c.height},
                       {"support_fraction", c.support_fraction},
                       {"move_probability", c.move_probability},
                       {"unsupported_move_probability", c.unsupported_move_probability},
                       {"states", c.states},
                       {"toggle_probability", c.toggle_probability},
                       {"remove_probability", c.remove_probability},
                       {"attributes", c.attributes}});
  }
  Json j{{"taxonomy", Json::parse(taxonomy_to_json_string(spec.taxonomy))},
         {"room_width", spec.room_width},
         {"room_depth", spec.room_depth},
         {"floor_spacing", spec.floor_spacing},
         {"surface_height", spec.surface_height},
         {"surface_offset", spec.surface_offset},
         {"surface_grid_x", spec.surface_grid_x},
         {"surface_grid_y", spec.surface_grid_y},
         {"support_clearance", spec.support_clearance},
         {"min_move_distance", spec.min_move_distance},
         {"position_jitter", spec.position_jitter},
         {"support_relation", spec.support_relation},
         {"num_scans", spec.num_scans},
         {"num_environments", spec.num_environments},
         {"split_fractions",
          {{"train", spec.split_fractions.train},
           {"val", spec.split_fractions.val},
           {"test", spec.split_fractions.test}}},
         {"classes", std::move(classes)}};
  return j.dump(2) + "\n";
}

SyntheticSequence generate_synthetic_scene_sequence(const GeneratorSpec& spec,
                                                    const std::string& environment_id,
                                                    nn::Rng& rng) {
  validate(spec);
  return SequenceBuilder(spec, environment_id, rng).run();
}

std::vector<std::vector<ObjectSnapshot>> replay_change_log(const ChangeLog& log) {
  std::map<ObjectId, ObjectSnapshot> inventory;
  for (const auto& s : log.initial) inventory.emplace(s.id, s);
  auto flatten = [&] {
    std::vector<ObjectSnapshot> out;
    for (const auto& [id, s] : inventory) out.push_back(s);
    return out;
  };
  std::vector<std::vector<ObjectSnapshot>> scans{flatten()};
  for (const auto& t : log.transitions) {
    for (const auto& e : t.events) {
      auto it = inventory.find(e.id);
      if (e.type != ChangeEvent::Type::kAdded && it == inventory.end()) {
        throw GeneratorError("change log refers to unknown object " + std::to_string(e.id.value));
      }
      switch (e.type) {
        case ChangeEvent::Type::kMoved:
          it->second.position = e.to;
          break;
        case ChangeEvent::Type::kStateChanged:
          it->second.state_attributes = e.state_to;
          break;
        case ChangeEvent::Type::kRemoved:
          inventory.erase(it);
          break;
        case ChangeEvent::Type::kAdded:
          inventory[e.id] = ObjectSnapshot{e.id, e.to, e.state_to};
          break;
      }
    }
    scans.push_back(flatten());
  }
  return scans;
}

LabelMap labels_from_change_log(const ChangeLog& log, std::size_t current, std::size_t future,
                                const LabelConfig& config) {
  const auto scans = replay_change_log(log);
  if (current >= scans.size() || future >= scans.size()) {
    throw LookupError("scan index out of range for change log");
  }
  std::map<ObjectId, const ObjectSnapshot*> later;
  for (const auto& s : scans[future]) later.emplace(s.id, &s);
  LabelMap labels;
  for (const auto& s : scans[current]) {
    VariabilityLabel label;
    auto it = later.find(s.id);
    if (it == later.end()) {
      label.instance = true;
      label.position_valid = false;
      label.state_valid = false;
    } else {
      label.position = (it->second->position - s.position).norm() >= config.epsilon;
      label.state = it->second->state_attributes != s.state_attributes;
      label.state_valid = !config.require_state_attributes || !s.state_attributes.empty();
    }
    labels.emplace(s.id, label);
  }
  return labels;
}

SyntheticDataset generate_synthetic_dataset(const GeneratorSpec& spec, std::uint64_t seed) {
  const auto splits = assign_splits(spec.num_environments, spec.split_fractions, seed);
  SyntheticDataset out{Dataset{spec.taxonomy, {}}, {}};
  for (std::size_t e = 0; e < spec.num_environments; ++e) {
    char id[32];
    std::snprintf(id, sizeof(id), "env_%04zu", e);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(e)};
    nn::Rng rng(seq);
    auto sequence = generate_synthetic_scene_sequence(spec, id, rng);
    out.dataset.environments.push_back({id, splits[e], std::move(sequence.scans)});
    out.logs.push_back(std::move(sequence.log));
  }
  return out;
}

std::string format_change_log(const ChangeLog& log, const Taxonomy& taxonomy) {
  Json initial = Json::array();
  for (const auto& s : log.initial) {
    initial.push_back({{"id", s.id.value},
                       {"position", vec_json(s.position)},
                       {"states", names_json(s.state_attributes, taxonomy)}});
  }
  Json transitions = Json::array();
  for (const auto& t : log.transitions) {
    Json events = Json::array();
    for (const auto& e : t.events) {
      Json je{{"type", to_string(e.type)}, {"id", e.id.value}};
      switch (e.type) {
        case ChangeEvent::Type::kMoved:
          je["from"] = vec_json(e.from);
          je["to"] = vec_json(e.to);
          break;
        case ChangeEvent::Type::kStateChanged:
          je["from"] = names_json(e.state_from, taxonomy);
          je["to"] = names_json(e.state_to, taxonomy);
          break;
        case ChangeEvent::Type::kRemoved:
          break;
        case ChangeEvent::Type::kAdded:
          je["position"] = vec_json(e.to);
          je["states"] = names_json(e.state_to, taxonomy);
          break;
      }
      events.push_back(std::move(je));
    }
    transitions.push_back(
        {{"from_scan", t.from_scan}, {"to_scan", t.to_scan}, {"events", std::move(events)}});
  }
  Json j{{"format_version", 1}, {"initial", std::move(initial)},
         {"transitions", std::move(transitions)}};
  return j.dump(2) + "\n";
}

void save_synthetic_dataset(const SyntheticDataset& data, const std::filesystem::path& root) {
  save_dataset(data.dataset, root);
  for (std::size_t e = 0; e < data.logs.size(); ++e) {
    write_text_file(root / data.dataset.environments[e].id / "changes.json",
                    format_change_log(data.logs[e], data.dataset.taxonomy));
  }
}

}  // namespace vsg
