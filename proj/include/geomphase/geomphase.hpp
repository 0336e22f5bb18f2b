#pragma once

#include "geomphase/error.hpp"
#include "geomphase/phase.hpp"
#include "geomphase/spin_algebra.hpp"
#include "geomphase/states.hpp"
#include "geomphase/uhlmann.hpp"
#include "geomphase/igp.hpp"
#include "geomphase/scan.hpp"
#include "geomphase/export.hpp"
