#pragma once

#include "roqam/core.hpp"
#include "roqam/random.hpp"
#include "roqam/fermion_model.hpp"
#include "roqam/exact_reference.hpp"
#include "roqam/arnoldi.hpp"
#include "roqam/emulation.hpp"
#include "roqam/greens.hpp"
#include "roqam/cost_model.hpp"
#include "roqam/qsvt_costing.hpp"
#include "roqam/roqam_costing.hpp"
#include "roqam/io.hpp"
#include "roqam/experiments.hpp"
