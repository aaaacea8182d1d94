#pragma once

#include "signalsim/detection.hpp"
#include "signalsim/errors.hpp"
#include "signalsim/experiment.hpp"
#include "signalsim/rng.hpp"
#include "signalsim/scenario.hpp"
#include "signalsim/signal_control.hpp"
#include "signalsim/suite.hpp"
#include "signalsim/trace.hpp"
#include "signalsim/units.hpp"
#include "signalsim/vehicle.hpp"
#include "signalsim/world.hpp"
