#pragma once

#include <szo/core.hpp>
#include <szo/flaxman.hpp>
#include <szo/lasso.hpp>
#include <szo/mirror_descent.hpp>
#include <szo/objective.hpp>
#include <szo/oracle.hpp>
#include <szo/params.hpp>
#include <szo/projection.hpp>
#include <szo/regret.hpp>
#include <szo/selection.hpp>
