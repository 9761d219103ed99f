#pragma once

#include "apfecbs/apf.hpp"
#include "apfecbs/bench.hpp"
#include "apfecbs/collision.hpp"
#include "apfecbs/highlevel.hpp"
#include "apfecbs/kinematics.hpp"
#include "apfecbs/lowlevel.hpp"
#include "apfecbs/scenario.hpp"
#include "apfecbs/trajectory.hpp"
