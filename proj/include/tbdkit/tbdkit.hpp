#pragma once

#include "tbdkit/kinematics.hpp"
#include "tbdkit/spinor_algebra.hpp"
#include "tbdkit/potentials.hpp"
#include "tbdkit/grid.hpp"
#include "tbdkit/fields.hpp"
#include "tbdkit/parallel.hpp"
#include "tbdkit/operators.hpp"
#include "tbdkit/currents.hpp"
#include "tbdkit/scalar_product.hpp"
#include "tbdkit/gauge.hpp"
#include "tbdkit/positivity.hpp"
#include "tbdkit/toy_model.hpp"
