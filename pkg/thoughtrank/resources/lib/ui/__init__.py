"""Output writers: result files, trace files and evaluation reports."""
