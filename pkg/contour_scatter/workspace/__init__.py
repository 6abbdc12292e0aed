"""Run workspace: artifact files, locks and the event log."""
