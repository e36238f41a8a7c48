#pragma once

#include "cascade_kde/baselines.hpp"
#include "cascade_kde/bench.hpp"
#include "cascade_kde/corruption.hpp"
#include "cascade_kde/csv.hpp"
#include "cascade_kde/density.hpp"
#include "cascade_kde/errors.hpp"
#include "cascade_kde/metrics.hpp"
#include "cascade_kde/restoration.hpp"
#include "cascade_kde/series.hpp"
