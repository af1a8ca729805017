#pragma once

#include "schwarz/config.hpp"
#include "schwarz/error.hpp"
#include "schwarz/functional.hpp"
#include "schwarz/gf1.hpp"
#include "schwarz/grid.hpp"
#include "schwarz/inequalities.hpp"
#include "schwarz/minimize.hpp"
#include "schwarz/parallel.hpp"
#include "schwarz/presets.hpp"
#include "schwarz/rearrange.hpp"
#include "schwarz/report.hpp"
#include "schwarz/version.hpp"
