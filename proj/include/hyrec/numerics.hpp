#pragma once

#include "hyrec/numerics/ops.hpp"
#include "hyrec/numerics/optim.hpp"
#include "hyrec/numerics/parallel.hpp"
#include "hyrec/numerics/random.hpp"
#include "hyrec/numerics/tensor.hpp"
