# MSO+U compositionality toolkit
