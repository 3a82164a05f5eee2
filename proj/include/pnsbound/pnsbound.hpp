// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pnsbound/core.hpp"
#include "pnsbound/classic_bounds.hpp"
#include "pnsbound/constraint_system.hpp"
#include "pnsbound/merge_bounds.hpp"
#include "pnsbound/oracle.hpp"
#include "pnsbound/scm_sim.hpp"
