#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fibertrap/actuators.hpp"
#include "fibertrap/cavity.hpp"
#include "fibertrap/mechanics.hpp"
#include "fibertrap/model.hpp"

namespace fibertrap::config {

inline constexpr int schema_version = 1;

/// One `key = value` pair, keyed by its dotted path (section.key).
struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  int column = 0;  // column of the first character of the value
};

/// Parsed but uninterpreted config text. Keys are unique.
class Document {
 public:
  [[nodiscard]] static Document parse(std::string_view text);

  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
  [[nodiscard]] const Entry* find(std::string_view key) const;

 private:
  std::vector<Entry> entries_;
};

/// Everything a run needs. Omitted keys take the documented defaults.
struct Config {
  int schema = schema_version;
  std::string tag;
  model::IonSpecies species = model::IonSpecies::from_name("Yb171");
  model::RFDrive rf;
  model::VoltageSet voltages = model::default_voltages(model::FiberCase::bare);
  model::TrapGeometry geometry{model::ElectrodeLayout{}, std::nullopt, default_domain(model::ElectrodeLayout{})};
  model::GridSettings grid;
  actuators::CombSpec comb;
  actuators::PlateSpec plate;
  mechanics::BeamSpec beam;     // width and length are set per run
  cavity::CavitySpec cavity;

  /// Box three times the patterned extent in every direction.
  [[nodiscard]] static model::DomainBox default_domain(const model::ElectrodeLayout& layout);

  bool operator==(const Config&) const;
};

/// Throws ConfigError (syntax, unknown key, bad unit; with line and column)
/// or ValidationError (violated invariant).
[[nodiscard]] Config parse_config(std::string_view text);
[[nodiscard]] Config load_config(const std::filesystem::path& path);

/// Full config text; parse_config(serialize(c)) == c.
[[nodiscard]] std::string serialize(const Config& c);

}  // namespace fibertrap::config
