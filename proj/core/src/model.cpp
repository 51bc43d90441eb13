#include "fibertrap/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fibertrap/errors.hpp"

namespace fibertrap::model {

namespace {

void require(bool ok, const char* invariant, const std::string& detail) {
  if (!ok) throw ValidationError(invariant, detail);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string side_tag(int s) { return s > 0 ? "+" : "-"; }

}  // namespace

IonSpecies IonSpecies::from_name(std::string_view name) {
  using constants::atomic_mass_unit;
  using constants::elementary_charge;
  struct Entry {
    std::string_view name;
    double mass_u;
  };
  static constexpr Entry table[] = {
      {"Yb171", 170.936323},
      {"Yb174", 173.938859},
      {"Ca40", 39.962591},
  };
  for (const auto& e : table) {
    if (e.name == name) {
      return IonSpecies{std::string(e.name), e.mass_u * atomic_mass_unit, elementary_charge};
    }
  }
  throw ValidationError("species.known", "unknown ion species '" + std::string(name) + "'");
}

void IonSpecies::validate() const {
  require(finite_positive(mass), "species.mass", "mass must be positive");
  require(std::isfinite(charge) && charge != 0.0, "species.charge", "charge must be nonzero");
}

void RFDrive::validate() const {
  require(finite_positive(amplitude), "rf.amplitude", "RF amplitude must be positive");
  require(finite_positive(angular_frequency), "rf.omega", "RF angular frequency must be positive");
}

void LayoutParams::validate() const {
  require(finite_positive(gap), "layout.gap", "gap must be positive");
  require(finite_positive(slot_width), "layout.slot_width", "slot width must be positive");
  require(finite_positive(inner_rail_width), "layout.inner_rail_width", "must be positive");
  require(finite_positive(rf_rail_width), "layout.rf_rail_width", "must be positive");
  require(finite_positive(outer_width), "layout.outer_width", "must be positive");
  require(finite_positive(b_length), "layout.b_length", "must be positive");
  require(finite_positive(a_length), "layout.a_length", "must be positive");
  require(a_count >= 1, "layout.a_count", "at least one A segment per side");
  const double column = 0.5 * b_length + a_count * (gap + a_length);
  require(rail_half_length > column + gap, "layout.rail_half_length",
          "rails must extend beyond the outer DC column");
}

ElectrodeLayout::ElectrodeLayout(LayoutParams p) : params_(p) {
  params_.validate();
  const double g = p.gap;
  const double slot_half = 0.5 * p.slot_width;
  const double inner0 = slot_half + g;
  const double inner1 = inner0 + p.inner_rail_width;
  const double rf0 = inner1 + g;
  const double rf1 = rf0 + p.rf_rail_width;
  const double out0 = rf1 + g;
  const double out1 = out0 + p.outer_width;
  const double ly = p.rail_half_length;

  electrodes_.push_back({"SLOT", ElectrodeRole::slot, {-slot_half, slot_half, -ly, ly}, '-', 0, 0});
  for (int sx : {1, -1}) {
    auto span = [sx](double a, double b) {
      return sx > 0 ? std::array<double, 2>{a, b} : std::array<double, 2>{-b, -a};
    };
    const auto in = span(inner0, inner1);
    const auto rf = span(rf0, rf1);
    const auto out = span(out0, out1);
    const std::string xs = side_tag(sx) + "x";
    electrodes_.push_back({"INNER" + xs, ElectrodeRole::inner_dc, {in[0], in[1], -ly, ly}, '-', sx, 0});
    electrodes_.push_back({"RF" + xs, ElectrodeRole::rf, {rf[0], rf[1], -ly, ly}, '-', sx, 0});
    const double hb = 0.5 * p.b_length;
    electrodes_.push_back({"B" + xs, ElectrodeRole::outer_dc, {out[0], out[1], -hb, hb}, 'B', sx, 0});
    for (int sy : {1, -1}) {
      double y = hb + g;
      for (int i = 0; i < p.a_count; ++i) {
        const double y0 = sy > 0 ? y : -(y + p.a_length);
        const double y1 = sy > 0 ? y + p.a_length : -y;
        electrodes_.push_back({"A" + xs + side_tag(sy) + "y" + std::to_string(i + 1),
                               ElectrodeRole::outer_dc,
                               {out[0], out[1], y0, y1},
                               'A',
                               sx,
                               sy});
        y += p.a_length + g;
      }
    }
  }
  std::sort(electrodes_.begin(), electrodes_.end(),
            [](const Electrode& a, const Electrode& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < electrodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < electrodes_.size(); ++j) {
      require(!electrodes_[i].region.overlaps(electrodes_[j].region), "layout.disjoint",
              electrodes_[i].name + " overlaps " + electrodes_[j].name);
    }
  }
}

LayoutParams ElectrodeLayout::reference_params() { return LayoutParams{}; }

const Electrode* ElectrodeLayout::find(std::string_view name) const {
  for (const auto& e : electrodes_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::array<double, 2> ElectrodeLayout::half_extent() const noexcept {
  double hx = 0.0, hy = 0.0;
  for (const auto& e : electrodes_) {
    hx = std::max({hx, std::abs(e.region.x0), std::abs(e.region.x1)});
    hy = std::max({hy, std::abs(e.region.y0), std::abs(e.region.y1)});
  }
  return {hx, hy};
}

std::vector<double> ElectrodeLayout::x_edges() const {
  std::vector<double> v;
  for (const auto& e : electrodes_) {
    v.push_back(e.region.x0);
    v.push_back(e.region.x1);
  }
  // Outer edge of the gap that separates the DC column from the ground plane.
  const double outer = half_extent()[0];
  v.push_back(outer + params_.gap);
  v.push_back(-outer - params_.gap);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
          v.end());
  return v;
}

std::vector<double> ElectrodeLayout::y_edges() const {
  std::vector<double> v;
  for (const auto& e : electrodes_) {
    if (e.role != ElectrodeRole::outer_dc) continue;
    v.push_back(e.region.y0);
    v.push_back(e.region.y1);
  }
  double top = 0.0;
  for (double y : v) top = std::max(top, std::abs(y));
  v.push_back(top + params_.gap);
  v.push_back(-top - params_.gap);
  v.push_back(params_.rail_half_length);
  v.push_back(-params_.rail_half_length);
  v.push_back(params_.rail_half_length + params_.gap);
  v.push_back(-params_.rail_half_length - params_.gap);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
          v.end());
  return v;
}

std::vector<std::array<double, 2>> ElectrodeLayout::x_gaps() const {
  // Consecutive edge pairs across y = 0 that are not covered by an electrode.
  std::vector<std::array<double, 2>> gaps;
  const auto edges = x_edges();
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    bool covered = false;
    for (const auto& e : electrodes_) covered = covered || e.region.contains(mid, 0.0);
    if (!covered) gaps.push_back({edges[i], edges[i + 1]});
  }
  return gaps;
}

std::vector<std::array<double, 2>> ElectrodeLayout::y_gaps() const {
  std::vector<std::array<double, 2>> gaps;
  const auto edges = y_edges();
  const double xc = 0.5 * (electrodes_.front().region.x0 + electrodes_.front().region.x1);
  const Electrode* b = find("B+x");
  const double x = b ? 0.5 * (b->region.x0 + b->region.x1) : xc;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] - edges[i] > params_.gap * 1.5) continue;
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    bool covered = false;
    for (const auto& e : electrodes_) covered = covered || e.region.contains(x, mid);
    bool rail = false;
    for (const auto& e : electrodes_) {
      if (e.role == ElectrodeRole::rf) rail = rail || std::abs(mid) > params_.rail_half_length;
    }
    if (!covered || rail) gaps.push_back({edges[i], edges[i + 1]});
  }
  return gaps;
}

ElectrodeLayout ElectrodeLayout::mirrored_x() const {
  ElectrodeLayout m = *this;
  for (auto& e : m.electrodes_) {
    e.region = {-e.region.x1, -e.region.x0, e.region.y0, e.region.y1};
    e.side_x = -e.side_x;
    const auto pos = e.name.find(e.side_x > 0 ? "-x" : "+x");
    if (pos != std::string::npos) e.name[pos] = e.side_x > 0 ? '+' : '-';
  }
  std::sort(m.electrodes_.begin(), m.electrodes_.end(),
            [](const Electrode& a, const Electrode& b) { return a.name < b.name; });
  return m;
}

std::string_view to_string(Coating c) noexcept {
  switch (c) {
    case Coating::bare: return "bare";
    case Coating::grounded_metal: return "grounded";
    case Coating::biased_metal: return "biased";
  }
  return "bare";
}

Coating coating_from_string(std::string_view s) {
  if (s == "bare" || s == "none") return Coating::bare;
  if (s == "grounded" || s == "grounded_metal") return Coating::grounded_metal;
  if (s == "biased" || s == "biased_metal") return Coating::biased_metal;
  throw std::invalid_argument("unknown coating '" + std::string(s) + "' (bare, grounded, biased)");
}

FiberAssembly FiberAssembly::centred(double cavity_length, double height) {
  FiberAssembly f;
  f.height = height;
  f.tip_minus_y = -0.5 * cavity_length;
  f.tip_plus_y = 0.5 * cavity_length;
  return f;
}

void FiberAssembly::validate() const {
  require(finite_positive(diameter), "fiber.diameter", "diameter must be positive");
  require(finite_positive(height), "fiber.height", "height must be positive");
  require(height > radius(), "fiber.clearance", "fiber would intersect the chip plane");
  require(tip_plus_y > tip_minus_y, "fiber.order", "fiber tips must face each other");
  require(finite_positive(permittivity) && permittivity >= 1.0, "fiber.permittivity",
          "relative permittivity must be >= 1");
  require(std::isfinite(coating_voltage) && std::isfinite(facet_charge_density), "fiber.finite",
          "coating voltage and facet charge must be finite");
}

double VoltageSet::electrode_voltage(const Electrode& e) const noexcept {
  switch (e.role) {
    case ElectrodeRole::rf: return 0.0;
    case ElectrodeRole::slot: return 0.0;
    case ElectrodeRole::inner_dc: return inner_rail;
    case ElectrodeRole::outer_dc: {
      const double base = e.group == 'A' ? v_a : v_b;
      return base + v_offset - e.side_x * du_x - e.side_y * du_y + du_z;
    }
  }
  return 0.0;
}

void VoltageSet::validate() const {
  for (double v : {v_a, v_b, v_offset, du_x, du_y, du_z, inner_rail}) {
    require(std::isfinite(v), "voltages.finite", "voltages must be finite");
  }
}

void GridSettings::validate() const {
  require(finite_positive(fine_spacing) && finite_positive(trap_spacing) &&
              finite_positive(max_spacing),
          "grid.spacing", "spacings must be positive");
  require(fine_spacing <= trap_spacing && trap_spacing <= max_spacing, "grid.order",
          "expected fine_spacing <= trap_spacing <= max_spacing");
  require(finite_positive(growth) && growth < 1.0, "grid.growth", "growth must lie in (0, 1)");
  require(finite_positive(tolerance) && tolerance < 1.0, "grid.tolerance", "tolerance must lie in (0, 1)");
  require(max_iterations >= 1, "grid.max_iterations", "at least one iteration");
}

TrapGeometry::TrapGeometry(ElectrodeLayout layout, std::optional<FiberAssembly> fiber, DomainBox domain)
    : layout_(std::move(layout)), fiber_(std::move(fiber)), domain_(domain) {
  require(finite_positive(domain_.half_x) && finite_positive(domain_.half_y) &&
              finite_positive(domain_.top_z),
          "domain.positive", "domain box must be positive");
  const auto ext = layout_.half_extent();
  require(domain_.half_x > ext[0] + layout_.params().gap, "domain.contains_layout",
          "domain must enclose the electrode layout in x");
  if (fiber_) {
    fiber_->validate();
    require(fiber_->height + fiber_->radius() < domain_.top_z, "domain.contains_fiber",
            "fiber extends above the domain");
    require(fiber_->tip_minus_y > -domain_.half_y && fiber_->tip_plus_y < domain_.half_y,
            "domain.contains_fiber", "fiber tips must lie inside the domain");
  }
}

TrapGeometry TrapGeometry::with_fiber(std::optional<FiberAssembly> fiber) const {
  return TrapGeometry(layout_, std::move(fiber), domain_);
}

std::string_view to_string(FiberCase c) noexcept {
  switch (c) {
    case FiberCase::none: return "none";
    case FiberCase::bare: return "bare";
    case FiberCase::coated: return "coated";
    case FiberCase::charged: return "charged";
  }
  return "none";
}

FiberCase fiber_case_from_string(std::string_view s) {
  if (s == "none") return FiberCase::none;
  if (s == "bare") return FiberCase::bare;
  if (s == "coated") return FiberCase::coated;
  if (s == "charged") return FiberCase::charged;
  throw std::invalid_argument("unknown fiber case '" + std::string(s) +
                              "' (none, bare, coated, charged)");
}

double default_fiber_height(FiberCase c) noexcept {
  return (c == FiberCase::coated || c == FiberCase::charged) ? 138e-6 : 169e-6;
}

VoltageSet default_voltages(FiberCase c) noexcept {
  VoltageSet v;
  switch (c) {
    case FiberCase::none:
    case FiberCase::bare: v.v_a = 24.3; v.v_b = -65.7; break;
    case FiberCase::coated: v.v_a = 26.6; v.v_b = -63.5; break;
    case FiberCase::charged: v.v_a = 19.4; v.v_b = -70.7; break;
  }
  return v;
}

std::optional<FiberAssembly> fiber_for_case(FiberCase c, double cavity_length) {
  if (c == FiberCase::none) return std::nullopt;
  auto f = FiberAssembly::centred(cavity_length, default_fiber_height(c));
  if (c != FiberCase::bare) f.coating = Coating::grounded_metal;
  if (c == FiberCase::charged) f.facet_charge_density = default_facet_charge_density();
  return f;
}

}  // namespace fibertrap::model
