#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "sheafdiff/potentials.hpp"

namespace sheafdiff {

struct DiffusionTrace;

/// Sheaf document:
///   { "vertices": [dims...],
///     "edges": [{"pair": [u, v], "dim": d}, ...],
///     "restrictions": {"u|u-v": [[row], ...], "v|u-v": ...},
///     "potentials": {"u-v": {"kind": "quadratic" | "offset_quadratic",
///                            "offset": [...], "weight": w}, ...} }
nlohmann::json sheaf_to_json(const CellularSheaf& sheaf,
                             const PotentialSet* potentials = nullptr);

struct SheafDocument {
  CellularSheaf sheaf;
  std::optional<PotentialSet> potentials;
};

/// Throws StructuralError / ConfigurationError on malformed documents.
SheafDocument sheaf_from_json(const nlohmann::json& doc);

void save_sheaf(const std::filesystem::path& path, const CellularSheaf& sheaf,
                const PotentialSet* potentials = nullptr);
SheafDocument load_sheaf(const std::filesystem::path& path);

/// CSV with header tick,energy,alpha,beta,rel_error,iterate_norm.
void write_trace_csv(std::ostream& out, const DiffusionTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const DiffusionTrace& trace);

}  // namespace sheafdiff
