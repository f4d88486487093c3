// Helpers for the acceptance suite live in tests/.
