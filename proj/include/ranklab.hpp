#pragma once

// Umbrella header: the whole toolkit in one include.

#include "ranklab/agreement.hpp"
#include "ranklab/bootstrap.hpp"
#include "ranklab/corpus.hpp"
#include "ranklab/date.hpp"
#include "ranklab/errors.hpp"
#include "ranklab/holdout.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/monitor.hpp"
#include "ranklab/numeric.hpp"
#include "ranklab/prng.hpp"
#include "ranklab/rational.hpp"
#include "ranklab/report.hpp"
#include "ranklab/scale.hpp"
#include "ranklab/stat_tests.hpp"
