#pragma once

#include "physeeio/core_model.hpp"
#include "physeeio/crosswalk.hpp"
#include "physeeio/decimal.hpp"
#include "physeeio/error.hpp"
#include "physeeio/mass_balance.hpp"
#include "physeeio/physical_extension.hpp"
#include "physeeio/pipeline.hpp"
#include "physeeio/price_imputation.hpp"
#include "physeeio/quality_report.hpp"
#include "physeeio/units.hpp"
