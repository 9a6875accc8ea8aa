#pragma once

// Convenience header pulling in the whole library.

#include "retracts/affine.hpp"
#include "retracts/analysis.hpp"
#include "retracts/beta.hpp"
#include "retracts/oracle.hpp"
#include "retracts/serialize.hpp"
#include "retracts/terms.hpp"
#include "retracts/types.hpp"
