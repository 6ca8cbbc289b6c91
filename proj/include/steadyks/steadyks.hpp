#pragma once

#include "steadyks/ball_minimizer.hpp"
#include "steadyks/common.hpp"
#include "steadyks/free_energy.hpp"
#include "steadyks/io.hpp"
#include "steadyks/lane_emden.hpp"
#include "steadyks/obstacle.hpp"
#include "steadyks/phase_plane.hpp"
#include "steadyks/picard.hpp"
#include "steadyks/profile.hpp"
#include "steadyks/quadrature.hpp"
#include "steadyks/scaling.hpp"
