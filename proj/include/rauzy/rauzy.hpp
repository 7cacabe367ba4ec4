#pragma once

#include "rauzy/rational.hpp"
#include "rauzy/gasket_core.hpp"
#include "rauzy/parallel.hpp"
#include "rauzy/rng.hpp"
#include "rauzy/enumeration.hpp"
#include "rauzy/renewal.hpp"
#include "rauzy/verify.hpp"
#include "rauzy/render.hpp"
#include "rauzy/reporting.hpp"
