#pragma once

#include "orf/binembed.hpp"
#include "orf/csv.hpp"
#include "orf/dataset.hpp"
#include "orf/errors.hpp"
#include "orf/experiments.hpp"
#include "orf/feature_maps.hpp"
#include "orf/kernel_eval.hpp"
#include "orf/parallel.hpp"
#include "orf/rng.hpp"
#include "orf/simulate.hpp"
#include "orf/stats.hpp"
#include "orf/transforms.hpp"
