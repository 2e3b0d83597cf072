#pragma once

#include "asdim/components.hpp"
#include "asdim/construction.hpp"
#include "asdim/cover.hpp"
#include "asdim/metric_space.hpp"
#include "asdim/oracle.hpp"
#include "asdim/random_spaces.hpp"
#include "asdim/solver.hpp"
#include "asdim/space_spec.hpp"
