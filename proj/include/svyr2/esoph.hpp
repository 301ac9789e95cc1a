#pragma once

#include <string>

#include "svyr2/table.hpp"

namespace svyr2 {

// Directory holding the bundled CSV files. Resolution order: the
// SVYR2_DATA_DIR environment variable, then ../share/svyr2 relative to the
// running executable, then the source-tree data directory compiled in.
// Throws IoError when none of them contains esoph_grouped.csv.
std::string data_dir();

// Ille-et-Vilaine esophageal cancer study (Breslow & Day), 88 grouped rows
// with columns agegp, alcgp, tobgp, ncases, ncontrols.
ColumnTable load_esoph_grouped();

// One row per subject: columns y, agegp, alcgp, tobgp, w. Within each group
// row, cases (y=1, w=1) come first, then controls (y=0, w=control_weight).
ColumnTable expand_esoph(const ColumnTable& grouped, double control_weight);

}  // namespace svyr2
