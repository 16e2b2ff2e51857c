# Applications module
