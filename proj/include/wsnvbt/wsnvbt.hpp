#pragma once

#include "wsnvbt/balanced.hpp"
#include "wsnvbt/config.hpp"
#include "wsnvbt/core.hpp"
#include "wsnvbt/energy.hpp"
#include "wsnvbt/errors.hpp"
#include "wsnvbt/experiment.hpp"
#include "wsnvbt/min_cover.hpp"
#include "wsnvbt/mmevbt.hpp"
#include "wsnvbt/rng.hpp"
#include "wsnvbt/scenario_io.hpp"
#include "wsnvbt/simulation.hpp"
#include "wsnvbt/text.hpp"
