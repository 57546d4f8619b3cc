#pragma once

#include "oscamp/bounded.hpp"
#include "oscamp/errors.hpp"
#include "oscamp/free_energy.hpp"
#include "oscamp/harris.hpp"
#include "oscamp/julia.hpp"
#include "oscamp/maps.hpp"
#include "oscamp/oscillation.hpp"
#include "oscamp/periodic.hpp"
#include "oscamp/polynomial.hpp"
#include "oscamp/real.hpp"
#include "oscamp/series.hpp"
