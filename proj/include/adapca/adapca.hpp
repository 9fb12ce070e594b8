#pragma once

#include "adapca/audit.hpp"
#include "adapca/capped_simplex.hpp"
#include "adapca/comparators.hpp"
#include "adapca/error.hpp"
#include "adapca/expert_learner.hpp"
#include "adapca/harness.hpp"
#include "adapca/linalg.hpp"
#include "adapca/pca_learner.hpp"
#include "adapca/variance_learners.hpp"
