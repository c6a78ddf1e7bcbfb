#pragma once

#include "projmi/error.hpp"
#include "projmi/info.hpp"
#include "projmi/mc.hpp"
#include "projmi/projective.hpp"
#include "projmi/qstate.hpp"
#include "projmi/rng.hpp"
#include "projmi/state_io.hpp"
#include "projmi/states.hpp"
#include "projmi/structure.hpp"
