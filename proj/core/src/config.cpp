#include "fibertrap/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "fibertrap/errors.hpp"

namespace fibertrap::config {

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool valid_path(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '.') {
      if (i + 1 < s.size() && s[i + 1] == '.') return false;
    } else if (!is_ident_char(s[i])) {
      return false;
    }
  }
  return true;
}

std::size_t skip_ws(std::string_view s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Returns the decoded value and advances past it. Quoted strings keep their
/// quotes so the interpreter can tell them apart from bare words.
std::string read_value(std::string_view line, std::size_t& i, int lineno) {
  if (i < line.size() && line[i] == '"') {
    std::string out = "\"";
    const std::size_t start = i;
    ++i;
    while (i < line.size() && line[i] != '"') {
      if (line[i] == '\\') {
        ++i;
        if (i >= line.size()) break;
        if (line[i] != '"' && line[i] != '\\') {
          throw ConfigError("unsupported escape '\\" + std::string(1, line[i]) + "'", lineno,
                            static_cast<int>(i));
        }
      }
      out += line[i++];
    }
    if (i >= line.size()) {
      throw ConfigError("unterminated string", lineno, static_cast<int>(start + 1));
    }
    ++i;
    out += '"';
    i = skip_ws(line, i);
    if (i < line.size() && line[i] != '#') {
      throw ConfigError("unexpected text after string", lineno, static_cast<int>(i + 1));
    }
    return out;
  }
  const std::size_t hash = line.find('#', i);
  std::string_view v = rtrim(line.substr(i, hash == std::string_view::npos ? line.npos : hash - i));
  i = line.size();
  return std::string(v);
}

}  // namespace

Document Document::parse(std::string_view text) {
  Document doc;
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    line = rtrim(line);
    std::size_t i = skip_ws(line, 0);
    if (i >= line.size() || line[i] == '#') continue;
    if (line[i] == '[') {
      const std::size_t close = line.find(']', i);
      if (close == std::string_view::npos) {
        throw ConfigError("missing ']' in section header", lineno, static_cast<int>(line.size() + 1));
      }
      const std::string_view name = line.substr(i + 1, close - i - 1);
      if (!valid_path(name)) {
        throw ConfigError("invalid section name '" + std::string(name) + "'", lineno,
                          static_cast<int>(i + 2));
      }
      std::size_t after = skip_ws(line, close + 1);
      if (after < line.size() && line[after] != '#') {
        throw ConfigError("unexpected text after section header", lineno, static_cast<int>(after + 1));
      }
      section = std::string(name);
      continue;
    }
    const std::size_t key_start = i;
    while (i < line.size() && (is_ident_char(line[i]) || line[i] == '.')) ++i;
    const std::string_view key = line.substr(key_start, i - key_start);
    if (key.empty() || !valid_path(key)) {
      throw ConfigError("expected a key", lineno, static_cast<int>(key_start + 1));
    }
    i = skip_ws(line, i);
    if (i >= line.size() || line[i] != '=') {
      throw ConfigError("expected '=' after key '" + std::string(key) + "'", lineno,
                        static_cast<int>(i + 1));
    }
    i = skip_ws(line, i + 1);
    const int value_col = static_cast<int>(i + 1);
    if (i >= line.size() || line[i] == '#') {
      throw ConfigError("missing value for key '" + std::string(key) + "'", lineno, value_col);
    }
    std::string value = read_value(line, i, lineno);
    std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.find(full)) {
      throw ConfigError("duplicate key '" + full + "'", lineno, static_cast<int>(key_start + 1));
    }
    doc.entries_.push_back({std::move(full), std::move(value), lineno, value_col});
  }
  return doc;
}

const Entry* Document::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

model::DomainBox Config::default_domain(const model::ElectrodeLayout& layout) {
  const auto ext = layout.half_extent();
  const double gap = layout.params().gap;
  return {3.0 * (ext[0] + gap), 3.0 * (ext[1] + gap), 3.0 * std::max(ext[0], ext[1])};
}

bool Config::operator==(const Config& o) const {
  return schema == o.schema && tag == o.tag && species == o.species && rf == o.rf &&
         voltages == o.voltages && geometry == o.geometry && grid == o.grid && comb == o.comb &&
         plate == o.plate && beam == o.beam && cavity == o.cavity;
}

namespace {

/// Mutable staging area filled from entries before the immutable geometry is
/// built.
struct Builder {
  int schema = schema_version;
  std::string tag;
  std::string species = "Yb171";
  model::RFDrive rf;
  bool omega_set = false;
  model::VoltageSet voltages = model::default_voltages(model::FiberCase::bare);
  model::LayoutParams layout = model::ElectrodeLayout::reference_params();
  bool fiber_present = false;
  bool fiber_explicit_presence = false;
  model::FiberAssembly fiber = model::FiberAssembly::centred(1e-3, 169e-6);
  std::optional<double> cavity_length;
  bool tips_set = false;
  std::optional<double> half_x, half_y, top_z;
  model::GridSettings grid;
  actuators::CombSpec comb;
  actuators::PlateSpec plate;
  mechanics::BeamSpec beam;
  cavity::CavitySpec cavity;
};

using Setter = std::function<void(Builder&, const Entry&)>;

[[noreturn]] void fail(const Entry& e, const std::string& msg) {
  throw ConfigError(e.key + ": " + msg, e.line, e.column);
}

double quantity(const Entry& e, Dimension d) {
  try {
    return parse_quantity(e.value, d);
  } catch (const std::invalid_argument& ex) {
    fail(e, ex.what());
  }
}

int integer(const Entry& e) {
  int v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc{} || p != end) fail(e, "expected an integer, got '" + e.value + "'");
  return v;
}

bool boolean(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e, "expected true or false, got '" + e.value + "'");
}

std::string text(const Entry& e) {
  if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') {
    return e.value.substr(1, e.value.size() - 2);
  }
  return e.value;
}

template <class T>
Setter q(T Builder::*obj, double T::*field, Dimension d) {
  return [=](Builder& b, const Entry& e) { (b.*obj).*field = quantity(e, d); };
}

template <class T>
Setter qi(T Builder::*obj, int T::*field) {
  return [=](Builder& b, const Entry& e) { (b.*obj).*field = integer(e); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  using D = Dimension;
  using B = Builder;
  static const std::map<std::string, Setter, std::less<>> table = {
      {"schema", [](B& b, const Entry& e) { b.schema = integer(e); }},
      {"tag", [](B& b, const Entry& e) { b.tag = text(e); }},
      {"species", [](B& b, const Entry& e) { b.species = text(e); }},
      {"rf.amplitude", q(&B::rf, &model::RFDrive::amplitude, D::voltage)},
      {"rf.omega",
       [](B& b, const Entry& e) {
         if (b.omega_set) fail(e, "give either rf.omega or rf.frequency, not both");
         b.rf.angular_frequency = quantity(e, D::angular_frequency);
         b.omega_set = true;
       }},
      {"rf.frequency",
       [](B& b, const Entry& e) {
         if (b.omega_set) fail(e, "give either rf.omega or rf.frequency, not both");
         b.rf.angular_frequency = 2.0 * constants::pi * quantity(e, D::frequency);
         b.omega_set = true;
       }},
      {"voltages.v_a", q(&B::voltages, &model::VoltageSet::v_a, D::voltage)},
      {"voltages.v_b", q(&B::voltages, &model::VoltageSet::v_b, D::voltage)},
      {"voltages.v_offset", q(&B::voltages, &model::VoltageSet::v_offset, D::voltage)},
      {"voltages.du_x", q(&B::voltages, &model::VoltageSet::du_x, D::voltage)},
      {"voltages.du_y", q(&B::voltages, &model::VoltageSet::du_y, D::voltage)},
      {"voltages.du_z", q(&B::voltages, &model::VoltageSet::du_z, D::voltage)},
      {"voltages.inner_rail", q(&B::voltages, &model::VoltageSet::inner_rail, D::voltage)},
      {"layout.gap", q(&B::layout, &model::LayoutParams::gap, D::length)},
      {"layout.slot_width", q(&B::layout, &model::LayoutParams::slot_width, D::length)},
      {"layout.inner_rail_width", q(&B::layout, &model::LayoutParams::inner_rail_width, D::length)},
      {"layout.rf_rail_width", q(&B::layout, &model::LayoutParams::rf_rail_width, D::length)},
      {"layout.outer_width", q(&B::layout, &model::LayoutParams::outer_width, D::length)},
      {"layout.b_length", q(&B::layout, &model::LayoutParams::b_length, D::length)},
      {"layout.a_length", q(&B::layout, &model::LayoutParams::a_length, D::length)},
      {"layout.a_count", qi(&B::layout, &model::LayoutParams::a_count)},
      {"layout.rail_half_length", q(&B::layout, &model::LayoutParams::rail_half_length, D::length)},
      {"fiber.present",
       [](B& b, const Entry& e) {
         b.fiber_present = boolean(e);
         b.fiber_explicit_presence = true;
       }},
      {"fiber.diameter", q(&B::fiber, &model::FiberAssembly::diameter, D::length)},
      {"fiber.height", q(&B::fiber, &model::FiberAssembly::height, D::length)},
      {"fiber.cavity_length",
       [](B& b, const Entry& e) {
         if (b.tips_set) fail(e, "give either fiber.cavity_length or the tip positions, not both");
         b.cavity_length = quantity(e, D::length);
       }},
      {"fiber.tip_minus_y",
       [](B& b, const Entry& e) {
         if (b.cavity_length) fail(e, "give either fiber.cavity_length or the tip positions, not both");
         b.fiber.tip_minus_y = quantity(e, D::length);
         b.tips_set = true;
       }},
      {"fiber.tip_plus_y",
       [](B& b, const Entry& e) {
         if (b.cavity_length) fail(e, "give either fiber.cavity_length or the tip positions, not both");
         b.fiber.tip_plus_y = quantity(e, D::length);
         b.tips_set = true;
       }},
      {"fiber.permittivity", q(&B::fiber, &model::FiberAssembly::permittivity, D::dimensionless)},
      {"fiber.coating",
       [](B& b, const Entry& e) {
         try {
           b.fiber.coating = model::coating_from_string(text(e));
         } catch (const std::invalid_argument& ex) {
           fail(e, ex.what());
         }
       }},
      {"fiber.coating_voltage", q(&B::fiber, &model::FiberAssembly::coating_voltage, D::voltage)},
      {"fiber.facet_charge",
       q(&B::fiber, &model::FiberAssembly::facet_charge_density, D::surface_charge_density)},
      {"domain.half_x", [](B& b, const Entry& e) { b.half_x = quantity(e, D::length); }},
      {"domain.half_y", [](B& b, const Entry& e) { b.half_y = quantity(e, D::length); }},
      {"domain.top_z", [](B& b, const Entry& e) { b.top_z = quantity(e, D::length); }},
      {"grid.fine_spacing", q(&B::grid, &model::GridSettings::fine_spacing, D::length)},
      {"grid.trap_spacing", q(&B::grid, &model::GridSettings::trap_spacing, D::length)},
      {"grid.max_spacing", q(&B::grid, &model::GridSettings::max_spacing, D::length)},
      {"grid.growth", q(&B::grid, &model::GridSettings::growth, D::dimensionless)},
      {"grid.tolerance", q(&B::grid, &model::GridSettings::tolerance, D::dimensionless)},
      {"grid.max_iterations", qi(&B::grid, &model::GridSettings::max_iterations)},
      {"comb.count", qi(&B::comb, &actuators::CombSpec::count)},
      {"comb.thickness", q(&B::comb, &actuators::CombSpec::thickness, D::length)},
      {"comb.gap", q(&B::comb, &actuators::CombSpec::gap, D::length)},
      {"comb.overlap", q(&B::comb, &actuators::CombSpec::overlap, D::length)},
      {"comb.rated_voltage", q(&B::comb, &actuators::CombSpec::rated_voltage, D::voltage)},
      {"plate.area", q(&B::plate, &actuators::PlateSpec::area, D::area)},
      {"plate.rest_gap", q(&B::plate, &actuators::PlateSpec::rest_gap, D::length)},
      {"plate.rated_voltage", q(&B::plate, &actuators::PlateSpec::rated_voltage, D::voltage)},
      {"beam.width", q(&B::beam, &mechanics::BeamSpec::width, D::length)},
      {"beam.thickness", q(&B::beam, &mechanics::BeamSpec::thickness, D::length)},
      {"beam.length", q(&B::beam, &mechanics::BeamSpec::length, D::length)},
      {"beam.youngs_modulus", q(&B::beam, &mechanics::BeamSpec::youngs_modulus, D::pressure)},
      {"beam.yield_stress", q(&B::beam, &mechanics::BeamSpec::yield_stress, D::pressure)},
      {"beam.density", q(&B::beam, &mechanics::BeamSpec::density, D::density)},
      {"cavity.length", q(&B::cavity, &cavity::CavitySpec::length, D::length)},
      {"cavity.radius1", q(&B::cavity, &cavity::CavitySpec::radius1, D::length)},
      {"cavity.radius2", q(&B::cavity, &cavity::CavitySpec::radius2, D::length)},
      {"cavity.finesse", q(&B::cavity, &cavity::CavitySpec::finesse, D::dimensionless)},
      {"cavity.mirror_diameter", q(&B::cavity, &cavity::CavitySpec::mirror_diameter, D::length)},
  };
  return table;
}

}  // namespace

Config parse_config(std::string_view input) {
  const Document doc = Document::parse(input);
  Builder b;
  for (const auto& e : doc.entries()) {
    const auto it = setters().find(e.key);
    if (it == setters().end()) fail(e, "unknown key");
    it->second(b, e);
    if (e.key.rfind("fiber.", 0) == 0 && !b.fiber_explicit_presence) b.fiber_present = true;
  }
  if (b.schema != schema_version) {
    const Entry* e = doc.find("schema");
    fail(*e, "unsupported schema version " + std::to_string(b.schema) + " (expected " +
                 std::to_string(schema_version) + ")");
  }

  Config c;
  c.schema = b.schema;
  c.tag = b.tag;
  try {
    c.species = model::IonSpecies::from_name(b.species);
  } catch (const ValidationError&) {
    fail(*doc.find("species"), "unknown species '" + b.species + "' (Yb171, Yb174, Ca40)");
  }
  c.species.validate();
  b.rf.validate();
  c.rf = b.rf;
  b.voltages.validate();
  c.voltages = b.voltages;
  model::ElectrodeLayout layout(b.layout);
  std::optional<model::FiberAssembly> fiber;
  if (b.fiber_present) {
    if (b.cavity_length) {
      b.fiber.tip_minus_y = -0.5 * *b.cavity_length;
      b.fiber.tip_plus_y = 0.5 * *b.cavity_length;
    }
    fiber = b.fiber;
  }
  model::DomainBox domain = Config::default_domain(layout);
  if (b.half_x) domain.half_x = *b.half_x;
  if (b.half_y) domain.half_y = *b.half_y;
  if (b.top_z) domain.top_z = *b.top_z;
  c.geometry = model::TrapGeometry(std::move(layout), fiber, domain);
  b.grid.validate();
  c.grid = b.grid;
  b.comb.validate();
  c.comb = b.comb;
  b.plate.validate();
  c.plate = b.plate;
  b.beam.validate();
  c.beam = b.beam;
  b.cavity.validate();
  c.cavity = b.cavity;
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string serialize(const Config& c) {
  using D = Dimension;
  std::ostringstream o;
  auto kv = [&o](std::string_view k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto qv = [&kv](std::string_view k, double v, D d) { kv(k, format_quantity(v, d)); };
  o << "# fibertrap configuration\n";
  kv("schema", std::to_string(c.schema));
  kv("tag", quote(c.tag));
  kv("species", c.species.name);

  o << "\n[rf]\n";
  qv("amplitude", c.rf.amplitude, D::voltage);
  qv("omega", c.rf.angular_frequency, D::angular_frequency);

  o << "\n[voltages]\n";
  qv("v_a", c.voltages.v_a, D::voltage);
  qv("v_b", c.voltages.v_b, D::voltage);
  qv("v_offset", c.voltages.v_offset, D::voltage);
  qv("du_x", c.voltages.du_x, D::voltage);
  qv("du_y", c.voltages.du_y, D::voltage);
  qv("du_z", c.voltages.du_z, D::voltage);
  qv("inner_rail", c.voltages.inner_rail, D::voltage);

  const auto& p = c.geometry.layout().params();
  o << "\n[layout]\n";
  qv("gap", p.gap, D::length);
  qv("slot_width", p.slot_width, D::length);
  qv("inner_rail_width", p.inner_rail_width, D::length);
  qv("rf_rail_width", p.rf_rail_width, D::length);
  qv("outer_width", p.outer_width, D::length);
  qv("b_length", p.b_length, D::length);
  qv("a_length", p.a_length, D::length);
  kv("a_count", std::to_string(p.a_count));
  qv("rail_half_length", p.rail_half_length, D::length);

  o << "\n[fiber]\n";
  if (const auto& f = c.geometry.fiber()) {
    kv("present", "true");
    qv("diameter", f->diameter, D::length);
    qv("height", f->height, D::length);
    qv("tip_minus_y", f->tip_minus_y, D::length);
    qv("tip_plus_y", f->tip_plus_y, D::length);
    qv("permittivity", f->permittivity, D::dimensionless);
    kv("coating", std::string(model::to_string(f->coating)));
    qv("coating_voltage", f->coating_voltage, D::voltage);
    qv("facet_charge", f->facet_charge_density, D::surface_charge_density);
  } else {
    kv("present", "false");
  }

  const auto& d = c.geometry.domain();
  o << "\n[domain]\n";
  qv("half_x", d.half_x, D::length);
  qv("half_y", d.half_y, D::length);
  qv("top_z", d.top_z, D::length);

  o << "\n[grid]\n";
  qv("fine_spacing", c.grid.fine_spacing, D::length);
  qv("trap_spacing", c.grid.trap_spacing, D::length);
  qv("max_spacing", c.grid.max_spacing, D::length);
  qv("growth", c.grid.growth, D::dimensionless);
  qv("tolerance", c.grid.tolerance, D::dimensionless);
  kv("max_iterations", std::to_string(c.grid.max_iterations));

  o << "\n[comb]\n";
  kv("count", std::to_string(c.comb.count));
  qv("thickness", c.comb.thickness, D::length);
  qv("gap", c.comb.gap, D::length);
  qv("overlap", c.comb.overlap, D::length);
  qv("rated_voltage", c.comb.rated_voltage, D::voltage);

  o << "\n[plate]\n";
  qv("area", c.plate.area, D::area);
  qv("rest_gap", c.plate.rest_gap, D::length);
  qv("rated_voltage", c.plate.rated_voltage, D::voltage);

  o << "\n[beam]\n";
  qv("width", c.beam.width, D::length);
  qv("thickness", c.beam.thickness, D::length);
  qv("length", c.beam.length, D::length);
  qv("youngs_modulus", c.beam.youngs_modulus, D::pressure);
  qv("yield_stress", c.beam.yield_stress, D::pressure);
  qv("density", c.beam.density, D::density);

  o << "\n[cavity]\n";
  qv("length", c.cavity.length, D::length);
  qv("radius1", c.cavity.radius1, D::length);
  qv("radius2", c.cavity.radius2, D::length);
  qv("finesse", c.cavity.finesse, D::dimensionless);
  qv("mirror_diameter", c.cavity.mirror_diameter, D::length);
  return o.str();
}

}  // namespace fibertrap::config
