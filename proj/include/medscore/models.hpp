// Convenience umbrella for the bundled model families.
#pragma once

#include "medscore/models/beta_regression.hpp"
#include "medscore/models/binary.hpp"
#include "medscore/models/gamma_strata.hpp"
#include "medscore/models/matched_tables.hpp"
#include "medscore/models/normal.hpp"
#include "medscore/models/skew_normal.hpp"
