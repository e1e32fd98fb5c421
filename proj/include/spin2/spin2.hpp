#pragma once

#include "elimination.hpp"
#include "exact.hpp"
#include "expbounds.hpp"
#include "fptas.hpp"
#include "gadgets.hpp"
#include "graph.hpp"
#include "hardness.hpp"
#include "holant.hpp"
#include "ising.hpp"
#include "rational.hpp"
#include "zerofree.hpp"
