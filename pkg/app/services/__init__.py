# Service layer for shared business logic
