#pragma once

// Umbrella header for the handwashing-recognition pipeline library.

#include "washrec/core.hpp"
#include "washrec/cross_validation.hpp"
#include "washrec/csv.hpp"
#include "washrec/errors.hpp"
#include "washrec/ersknn.hpp"
#include "washrec/experiment.hpp"
#include "washrec/features.hpp"
#include "washrec/gaf.hpp"
#include "washrec/mcnemar.hpp"
#include "washrec/metrics.hpp"
#include "washrec/perf.hpp"
#include "washrec/report_io.hpp"
#include "washrec/rng.hpp"
#include "washrec/selection.hpp"
#include "washrec/svm.hpp"
#include "washrec/synth.hpp"
#include "washrec/trace.hpp"
#include "washrec/windowing.hpp"
