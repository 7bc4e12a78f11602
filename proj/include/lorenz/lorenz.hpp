#pragma once

#include "lorenz/catalog.hpp"
#include "lorenz/config.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/graph.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/model.hpp"
#include "lorenz/parallel.hpp"
#include "lorenz/potential.hpp"
#include "lorenz/pressure.hpp"
#include "lorenz/report.hpp"
#include "lorenz/repro.hpp"
#include "lorenz/serialize.hpp"
#include "lorenz/spectrum.hpp"
#include "lorenz/symbolic.hpp"
