#pragma once

#include "tetherswarm/common.hpp"
#include "tetherswarm/config_io.hpp"
#include "tetherswarm/control.hpp"
#include "tetherswarm/hand_trajectory.hpp"
#include "tetherswarm/haptic_scene.hpp"
#include "tetherswarm/log_io.hpp"
#include "tetherswarm/sensing.hpp"
#include "tetherswarm/sim_config.hpp"
#include "tetherswarm/sim_engine.hpp"
#include "tetherswarm/tether.hpp"
#include "tetherswarm/vehicle_dynamics.hpp"
