# Matroid toolkit
