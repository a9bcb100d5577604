#pragma once

#include "hyrec/dataset.hpp"
#include "hyrec/error.hpp"
#include "hyrec/metrics.hpp"
#include "hyrec/numerics.hpp"
#include "hyrec/pipeline.hpp"
#include "hyrec/ranking.hpp"
#include "hyrec/raterec.hpp"
#include "hyrec/seqrec.hpp"
